//! Clifford-deformed surface codes.
//!
//! A code assigns a Pauli letter to every (stabilizer, qubit) incidence.
//! Builders fill the table from a per-qubit pair of letters: one measured by
//! the qubit's vertical neighbours and one by its horizontal neighbours.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Lattice, LatticeSpec, Node, Side, Sublattice};
use crate::noise::{NoiseModel, QubitRates};
use crate::pauli::{LogicalPair, Pauli, PauliOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeFamily {
    Css,
    Xy,
    Xzzx,
    Xxzz,
    Mhhm,
    Mmhh,
    Custom,
}

impl CodeFamily {
    pub fn name(self) -> &'static str {
        match self {
            CodeFamily::Css => "css",
            CodeFamily::Xy => "xy",
            CodeFamily::Xzzx => "xzzx",
            CodeFamily::Xxzz => "xxzz",
            CodeFamily::Mhhm => "mhhm",
            CodeFamily::Mmhh => "mmhh",
            CodeFamily::Custom => "custom",
        }
    }

    pub fn needs_noise(self) -> bool {
        matches!(self, CodeFamily::Mhhm | CodeFamily::Mmhh)
    }
}

impl std::str::FromStr for CodeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "css" => CodeFamily::Css,
            "xy" => CodeFamily::Xy,
            "xzzx" => CodeFamily::Xzzx,
            "xxzz" => CodeFamily::Xxzz,
            "mhhm" => CodeFamily::Mhhm,
            "mmhh" => CodeFamily::Mmhh,
            "custom" => CodeFamily::Custom,
            other => return Err(Error::Parse(format!("unknown code family {other:?}"))),
        })
    }
}

/// Letters seen by one qubit: `vertical` is measured by the stabilizers above
/// and below it, `horizontal` by those to its left and right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitLetters {
    pub vertical: Pauli,
    pub horizontal: Pauli,
}

#[derive(Clone, Debug)]
pub struct CodeLayout {
    lattice: Arc<Lattice>,
    /// Start of each stabilizer's row in `letters`.
    offsets: Vec<usize>,
    letters: Vec<Pauli>,
    logicals: LogicalPair,
    family: CodeFamily,
}

impl CodeLayout {
    /// Assemble a code from an explicit incidence table, given per stabilizer
    /// in the order of `StabilizerSite::support`. Logicals are derived from
    /// the detector graphs; the table is not validated.
    pub fn from_table(lattice: Arc<Lattice>, table: Vec<Vec<Pauli>>, family: CodeFamily) -> Result<Self> {
        if table.len() != lattice.num_stabilizers() {
            return Err(Error::InvalidLattice("assignment table has wrong stabilizer count".into()));
        }
        let mut offsets = Vec::with_capacity(table.len() + 1);
        let mut letters = Vec::new();
        for (s, row) in table.into_iter().enumerate() {
            if row.len() != lattice.stabilizers[s].support.len() {
                return Err(Error::InvalidLattice(format!("row {s} does not match support")));
            }
            offsets.push(letters.len());
            letters.extend(row);
        }
        offsets.push(letters.len());
        let placeholder = PauliOperator::identity(lattice.num_qubits());
        let mut code = CodeLayout {
            lattice,
            offsets,
            letters,
            logicals: LogicalPair { xbar: placeholder.clone(), zbar: placeholder },
            family,
        };
        code.logicals = chain_logicals(&code);
        Ok(code)
    }

    /// Code whose every qubit sees the given vertical/horizontal letters.
    pub fn from_qubit_letters(lattice: Arc<Lattice>, per_qubit: &[QubitLetters], family: CodeFamily) -> Result<Self> {
        if per_qubit.len() != lattice.num_qubits() {
            return Err(Error::LengthMismatch { left: per_qubit.len(), right: lattice.num_qubits() });
        }
        for (q, l) in per_qubit.iter().enumerate() {
            if l.vertical == l.horizontal || l.vertical == Pauli::I || l.horizontal == Pauli::I {
                return Err(Error::InconsistentDeformation { qubit: q });
            }
        }
        let table = lattice
            .stabilizers
            .iter()
            .map(|s| {
                s.support
                    .iter()
                    .map(|&q| {
                        if lattice.neighborhoods[q].vertical.contains(&s.id) {
                            per_qubit[q].vertical
                        } else {
                            per_qubit[q].horizontal
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_table(lattice, table, family)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn spec(&self) -> LatticeSpec {
        self.lattice.spec
    }

    pub fn family(&self) -> CodeFamily {
        self.family
    }

    pub fn num_qubits(&self) -> usize {
        self.lattice.num_qubits()
    }

    pub fn num_stabilizers(&self) -> usize {
        self.lattice.num_stabilizers()
    }

    pub fn logicals(&self) -> &LogicalPair {
        &self.logicals
    }

    /// (qubit, measured letter) pairs of stabilizer `s`.
    pub fn incidences(&self, s: usize) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        let support = &self.lattice.stabilizers[s].support;
        let row = &self.letters[self.offsets[s]..self.offsets[s + 1]];
        support.iter().copied().zip(row.iter().copied())
    }

    /// Letter stabilizer `s` measures on qubit `q`, if `q` is in its support.
    pub fn letter(&self, s: usize, q: usize) -> Option<Pauli> {
        self.incidences(s).find(|&(qq, _)| qq == q).map(|(_, l)| l)
    }

    pub fn set_letter(&mut self, s: usize, q: usize, p: Pauli) -> bool {
        let pos = self.lattice.stabilizers[s].support.iter().position(|&qq| qq == q);
        match pos {
            Some(k) => {
                self.letters[self.offsets[s] + k] = p;
                true
            }
            None => false,
        }
    }

    pub fn stabilizer_op(&self, s: usize) -> PauliOperator {
        PauliOperator::from_sparse(self.num_qubits(), self.incidences(s))
    }

    pub fn stabilizer_ops(&self) -> Vec<PauliOperator> {
        (0..self.num_stabilizers()).map(|s| self.stabilizer_op(s)).collect()
    }

    /// Letter measured on qubit `q` by the cells of sub-lattice `sub`.
    pub fn sublattice_letter(&self, q: usize, sub: Sublattice) -> Pauli {
        let g = self.lattice.sublattice(sub);
        let edge = &g.edges[g.edge_of_qubit[q]];
        let Node::Cell(c) = edge.a else { unreachable!("edges start at a cell") };
        self.letter(g.cells[c], q).expect("qubit lies in the support of its detector-edge cell")
    }

    /// Single-qubit Pauli that toggles only sub-lattice `sub` on qubit `q`.
    pub fn step_letter(&self, q: usize, sub: Sublattice) -> Pauli {
        self.sublattice_letter(q, sub.other())
    }

    pub fn replace_logicals(&mut self, logicals: LogicalPair) {
        self.logicals = logicals;
    }

    pub fn to_document(&self) -> CodeDocument {
        CodeDocument {
            lattice: self.lattice.spec,
            family: self.family,
            assignment: (0..self.num_stabilizers())
                .map(|s| self.incidences(s).map(|(q, p)| (q, p.to_char())).collect())
                .collect(),
            xbar: self.logicals.xbar.to_string(),
            zbar: self.logicals.zbar.to_string(),
        }
    }

    pub fn from_document(doc: &CodeDocument) -> Result<Self> {
        let lattice = Arc::new(crate::geometry::build_lattice(doc.lattice)?);
        let mut table = Vec::with_capacity(doc.assignment.len());
        for (s, row) in doc.assignment.iter().enumerate() {
            let support = lattice
                .stabilizers
                .get(s)
                .ok_or_else(|| Error::Parse("too many stabilizers in document".into()))?
                .support
                .clone();
            let mut letters = vec![Pauli::I; support.len()];
            for &(q, c) in row {
                let k = support
                    .iter()
                    .position(|&qq| qq == q)
                    .ok_or_else(|| Error::Parse(format!("qubit {q} not in support of stabilizer {s}")))?;
                letters[k] = Pauli::from_char(c).ok_or_else(|| Error::Parse(format!("bad letter {c:?}")))?;
            }
            table.push(letters);
        }
        let mut code = Self::from_table(lattice, table, doc.family)?;
        code.logicals = LogicalPair { xbar: doc.xbar.parse()?, zbar: doc.zbar.parse()? };
        Ok(code)
    }
}

/// JSON form of a code layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDocument {
    pub lattice: LatticeSpec,
    pub family: CodeFamily,
    /// Per stabilizer: (qubit id, letter).
    pub assignment: Vec<Vec<(usize, char)>>,
    pub xbar: String,
    pub zbar: String,
}

fn uniform(lattice: &Lattice, vertical: Pauli, horizontal: Pauli) -> Vec<QubitLetters> {
    vec![QubitLetters { vertical, horizontal }; lattice.num_qubits()]
}

/// Primal cells measure Z and dual cells measure X on every qubit.
pub fn build_css(lattice: Arc<Lattice>) -> CodeLayout {
    let letters = by_sublattice(&lattice, |_| (Pauli::Z, Pauli::X));
    CodeLayout::from_qubit_letters(lattice, &letters, CodeFamily::Css).expect("CSS letters are consistent")
}

/// CSS with the primal (plaquette) letters mapped Z -> Y.
pub fn build_xy(lattice: Arc<Lattice>) -> CodeLayout {
    let letters = by_sublattice(&lattice, |_| (Pauli::Y, Pauli::X));
    CodeLayout::from_qubit_letters(lattice, &letters, CodeFamily::Xy).expect("XY letters are consistent")
}

/// Every cell measures X on its north/south qubits and Z on east/west.
pub fn build_xzzx(lattice: Arc<Lattice>) -> CodeLayout {
    let letters = uniform(&lattice, Pauli::X, Pauli::Z);
    CodeLayout::from_qubit_letters(lattice, &letters, CodeFamily::Xzzx).expect("XZZX letters are consistent")
}

/// XZZX with X and Z interchanged on a checkerboard of qubits, giving
/// logical operators of alternating letters.
pub fn build_xxzz(lattice: Arc<Lattice>) -> CodeLayout {
    let letters: Vec<QubitLetters> = lattice
        .neighborhoods
        .iter()
        .map(|nb| {
            if nb.checker {
                QubitLetters { vertical: Pauli::Z, horizontal: Pauli::X }
            } else {
                QubitLetters { vertical: Pauli::X, horizontal: Pauli::Z }
            }
        })
        .collect();
    CodeLayout::from_qubit_letters(lattice, &letters, CodeFamily::Xxzz).expect("XXZZ letters are consistent")
}

/// High- and medium-rate letters of a qubit; ties resolve in the order X, Y, Z.
pub fn high_medium(rates: &QubitRates) -> (Pauli, Pauli) {
    let mut order = [(Pauli::X, rates.x), (Pauli::Y, rates.y), (Pauli::Z, rates.z)];
    // Stable sort keeps X before Y before Z among equal rates.
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    (order[0].0, order[1].0)
}

fn check_rates(noise: &NoiseModel, lattice: &Lattice) -> Result<()> {
    if noise.per_qubit.len() != lattice.num_qubits() {
        return Err(Error::LengthMismatch { left: noise.per_qubit.len(), right: lattice.num_qubits() });
    }
    for (q, r) in noise.per_qubit.iter().enumerate() {
        if r.x < 0.0 || r.y < 0.0 || r.z < 0.0 {
            return Err(Error::InvalidNoise(format!("negative rate on qubit {q}")));
        }
    }
    Ok(())
}

/// North/south neighbours measure each qubit's high-rate letter, east/west its
/// medium-rate letter.
pub fn build_mhhm(lattice: Arc<Lattice>, noise: &NoiseModel) -> Result<CodeLayout> {
    check_rates(noise, &lattice)?;
    let letters: Vec<QubitLetters> = noise
        .per_qubit
        .iter()
        .map(|r| {
            let (h, m) = high_medium(r);
            QubitLetters { vertical: h, horizontal: m }
        })
        .collect();
    let code = CodeLayout::from_qubit_letters(lattice, &letters, CodeFamily::Mhhm)?;
    debug_assert!(validate_consistency(&code));
    Ok(code)
}

/// The MHHM assignment with medium and high letters interchanged on the
/// checkerboard used by XXZZ.
pub fn build_mmhh(lattice: Arc<Lattice>, noise: &NoiseModel) -> Result<CodeLayout> {
    check_rates(noise, &lattice)?;
    let letters: Vec<QubitLetters> = noise
        .per_qubit
        .iter()
        .zip(&lattice.neighborhoods)
        .map(|(r, nb)| {
            let (h, m) = high_medium(r);
            if nb.checker {
                QubitLetters { vertical: h, horizontal: m }
            } else {
                QubitLetters { vertical: m, horizontal: h }
            }
        })
        .collect();
    let code = CodeLayout::from_qubit_letters(lattice, &letters, CodeFamily::Mmhh)?;
    debug_assert!(validate_consistency(&code));
    Ok(code)
}

/// Build any family; noise is required for MHHM and MMHH.
pub fn build_family(family: CodeFamily, lattice: Arc<Lattice>, noise: Option<&NoiseModel>) -> Result<CodeLayout> {
    match family {
        CodeFamily::Css => Ok(build_css(lattice)),
        CodeFamily::Xy => Ok(build_xy(lattice)),
        CodeFamily::Xzzx => Ok(build_xzzx(lattice)),
        CodeFamily::Xxzz => Ok(build_xxzz(lattice)),
        CodeFamily::Mhhm | CodeFamily::Mmhh => {
            let noise = noise.ok_or_else(|| Error::InvalidNoise("tailored codes need a noise model".into()))?;
            if family == CodeFamily::Mhhm {
                build_mhhm(lattice, noise)
            } else {
                build_mmhh(lattice, noise)
            }
        }
        CodeFamily::Custom => Err(Error::InvalidExperiment("custom codes are built from a table".into())),
    }
}

fn by_sublattice(lattice: &Lattice, f: impl Fn(usize) -> (Pauli, Pauli)) -> Vec<QubitLetters> {
    lattice
        .neighborhoods
        .iter()
        .enumerate()
        .map(|(q, nb)| {
            let (primal, dual) = f(q);
            match nb.vertical_sublattice {
                Some(Sublattice::Primal) => QubitLetters { vertical: primal, horizontal: dual },
                _ => QubitLetters { vertical: dual, horizontal: primal },
            }
        })
        .collect()
}

/// Vertical neighbours agree, horizontal neighbours agree and the two letters
/// differ, checked on the neighbours present at each qubit.
pub fn validate_consistency(code: &CodeLayout) -> bool {
    let lattice = code.lattice();
    lattice.neighborhoods.iter().enumerate().all(|(q, nb)| {
        let letters = |stabs: &[usize]| -> Option<Vec<Pauli>> {
            stabs.iter().map(|&s| code.letter(s, q)).collect()
        };
        let (Some(v), Some(h)) = (letters(&nb.vertical), letters(&nb.horizontal)) else {
            return false;
        };
        let all_same = |l: &[Pauli]| l.windows(2).all(|w| w[0] == w[1]);
        if v.contains(&Pauli::I) || h.contains(&Pauli::I) || !all_same(&v) || !all_same(&h) {
            return false;
        }
        match (v.first(), h.first()) {
            (Some(a), Some(b)) => a != b,
            _ => true,
        }
    })
}

/// Minimum-weight logical pair read off the detector graphs: a shortest path
/// between the two boundaries of one sub-lattice, with each crossed qubit
/// carrying the letter that toggles only that sub-lattice.
pub fn chain_logicals(code: &CodeLayout) -> LogicalPair {
    LogicalPair {
        xbar: boundary_to_boundary(code, Sublattice::Primal),
        zbar: boundary_to_boundary(code, Sublattice::Dual),
    }
}

fn boundary_to_boundary(code: &CodeLayout, sub: Sublattice) -> PauliOperator {
    let g = code.lattice().sublattice(sub);
    let start = g.node_index(Node::Boundary(Side::Low));
    let goal = g.node_index(Node::Boundary(Side::High));
    let mut prev_edge = vec![usize::MAX; g.num_nodes()];
    let mut seen = vec![false; g.num_nodes()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if u == goal {
            break;
        }
        for &e in &g.adjacency[u] {
            let v = g.other_end(e, u);
            if !seen[v] && (v == goal || v < g.num_cells()) {
                seen[v] = true;
                prev_edge[v] = e;
                queue.push_back(v);
            }
        }
    }
    let mut op = PauliOperator::identity(code.num_qubits());
    let mut v = goal;
    while v != start {
        let e = prev_edge[v];
        let q = g.edges[e].qubit;
        op.apply(q, code.step_letter(q, sub));
        v = g.other_end(e, v);
    }
    op
}

/// Row-reduced GF(2) matrix over the 2N symplectic columns (x bits then z bits).
struct BinaryRows {
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl BinaryRows {
    fn from_ops(ops: &[PauliOperator], n: usize) -> Self {
        let words = (2 * n).div_ceil(64);
        let rows = ops.iter().map(|op| symplectic_row(op, n, words)).collect();
        BinaryRows { words, rows }
    }

    fn bit(row: &[u64], c: usize) -> bool {
        (row[c / 64] >> (c % 64)) & 1 == 1
    }

    /// Gaussian elimination in place; returns pivot columns.
    fn reduce(&mut self) -> Vec<usize> {
        let ncols = self.words * 64;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            if r == self.rows.len() {
                break;
            }
            let Some(p) = (r..self.rows.len()).find(|&i| Self::bit(&self.rows[i], c)) else { continue };
            self.rows.swap(r, p);
            let pivot = self.rows[r].clone();
            for i in 0..self.rows.len() {
                if i != r && Self::bit(&self.rows[i], c) {
                    for w in 0..self.words {
                        self.rows[i][w] ^= pivot[w];
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        self.rows.truncate(r);
        pivots
    }
}

fn symplectic_row(op: &PauliOperator, n: usize, words: usize) -> Vec<u64> {
    let mut row = vec![0u64; words];
    for q in 0..n {
        let p = op.get(q);
        if p.x_bit() {
            row[q / 64] |= 1 << (q % 64);
        }
        if p.z_bit() {
            let c = n + q;
            row[c / 64] |= 1 << (c % 64);
        }
    }
    row
}

/// GF(2) rank of a set of Pauli operators.
pub fn rank(ops: &[PauliOperator], n: usize) -> usize {
    let mut m = BinaryRows::from_ops(ops, n);
    m.reduce().len()
}

/// Whether `op` lies in the group generated by `ops`.
pub fn in_span(ops: &[PauliOperator], op: &PauliOperator, n: usize) -> bool {
    let base = rank(ops, n);
    let mut with = ops.to_vec();
    with.push(op.clone());
    rank(&with, n) == base
}

/// Logical pair computed by linear algebra over the symplectic check matrix:
/// a basis of the normalizer is extended beyond the stabilizer span and an
/// anticommuting pair is selected from it.
pub fn derive_logicals(code: &CodeLayout) -> Result<LogicalPair> {
    let n = code.num_qubits();
    let stabs = code.stabilizer_ops();
    let r = rank(&stabs, n);
    if r != n - 1 {
        return Err(Error::StabilizerRank { rank: r, expected: n - 1 });
    }
    // The normalizer is the null space of the check matrix under the
    // symplectic form: v commutes with row s iff <s_x, v_z> + <s_z, v_x> = 0.
    // Swap halves so the condition becomes an ordinary dot product.
    let swapped: Vec<PauliOperator> = stabs
        .iter()
        .map(|s| PauliOperator::from_sparse(n, (0..n).map(|q| (q, swap_xz(s.get(q))))))
        .collect();
    let mut m = BinaryRows::from_ops(&swapped, n);
    let pivots = m.reduce();
    let free: Vec<usize> = (0..2 * n).filter(|c| !pivots.contains(c)).collect();
    let mut normalizer = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![false; 2 * n];
        v[f] = true;
        for (row, &pc) in m.rows.iter().zip(&pivots) {
            if BinaryRows::bit(row, f) {
                v[pc] = true;
            }
        }
        normalizer.push(PauliOperator::from_sparse(
            n,
            (0..n).map(|q| (q, Pauli::from_bits(v[q], v[n + q]))),
        ));
    }
    let outside: Vec<PauliOperator> =
        normalizer.into_iter().filter(|op| !in_span(&stabs, op, n)).collect();
    for a in &outside {
        for b in &outside {
            if a.anticommutes(b)? {
                return Ok(LogicalPair { xbar: a.clone(), zbar: b.clone() });
            }
        }
    }
    Err(Error::StabilizerRank { rank: r, expected: n - 1 })
}

fn swap_xz(p: Pauli) -> Pauli {
    Pauli::from_bits(p.z_bit(), p.x_bit())
}
