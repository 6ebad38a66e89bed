//! Minimum-weight perfect-matching decoder.
//!
//! Each sub-lattice is decoded on its own. Defects are paired with each other
//! or with the nearest absorbing boundary so that the total weight is
//! minimal, and every pair is joined by a shortest chain of single-qubit
//! Paulis that toggle only that sub-lattice.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::code::CodeLayout;
use crate::error::{Error, Result};
use crate::geometry::{Axis, Displacement, Node, Side, Sublattice, SublatticeGraph};
use crate::matching::{max_weight_matching, min_weight_perfect_matching, quantize, MatchingGraph};
use crate::noise::{sublattice_flip_probability, NoiseModel};
use crate::pauli::{Pauli, PauliOperator, Syndrome};

/// Smallest probability fed to a logarithm.
const PROB_FLOOR: f64 = 1e-12;

/// Edge-weight rule with all parameters resolved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightMetric {
    /// `lx + lz`.
    Manhattan,
    /// `wx·lx + wz·lz`.
    WeightedManhattan { wx: f64, wz: f64 },
    /// Shortest path with qubit edges weighted by `−ln` of their flip probability.
    Dijkstra,
    /// Exact `−ln P1` of a single-qubit chain family: `L(−ln p1) − ln C(L, lx)`.
    Degeneracy { p1: f64 },
    /// `L − ln C(L, lx)`, the form with the `−ln p1` factor dropped.
    DegeneracyLiteral,
    /// `−ln(P1 + P2)` with a diagonal two-qubit chain term.
    DegeneracyPlusCorrelation { p1: f64, p2: f64 },
}

impl WeightMetric {
    pub fn name(&self) -> &'static str {
        match self {
            WeightMetric::Manhattan => "manhattan",
            WeightMetric::WeightedManhattan { .. } => "weighted_manhattan",
            WeightMetric::Dijkstra => "dijkstra",
            WeightMetric::Degeneracy { .. } => "degeneracy",
            WeightMetric::DegeneracyLiteral => "degeneracy_literal",
            WeightMetric::DegeneracyPlusCorrelation { .. } => "degeneracy_correlation",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &str, p: f64| {
            if p > 0.0 && p < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidMetric(format!("{name} = {p} must lie in (0, 1)")))
            }
        };
        match *self {
            WeightMetric::WeightedManhattan { wx, wz } => {
                if !(wx.is_finite() && wz.is_finite() && wx >= 0.0 && wz >= 0.0) {
                    return Err(Error::InvalidMetric(format!("weights ({wx}, {wz}) must be finite and nonnegative")));
                }
                Ok(())
            }
            WeightMetric::Degeneracy { p1 } => open_unit("p1", p1),
            WeightMetric::DegeneracyPlusCorrelation { p1, p2 } => {
                open_unit("p1", p1)?;
                open_unit("p2", p2)
            }
            _ => Ok(()),
        }
    }

    /// Weight of a displacement for the closed-form metrics; `None` for
    /// `Dijkstra`, whose weights depend on the path.
    pub fn displacement_weight(&self, d: Displacement) -> Option<f64> {
        let (lx, lz) = (d.lx, d.lz);
        let l = lx + lz;
        Some(match *self {
            WeightMetric::Manhattan => l as f64,
            WeightMetric::WeightedManhattan { wx, wz } => wx * lx as f64 + wz * lz as f64,
            WeightMetric::Dijkstra => return None,
            WeightMetric::Degeneracy { p1 } => -ln_p1(l, lx, p1),
            WeightMetric::DegeneracyLiteral => l as f64 - ln_binomial(l, lx),
            WeightMetric::DegeneracyPlusCorrelation { p1, p2 } => {
                let a = ln_p1(l, lx, p1);
                let total = match ln_p2(lx, lz, p2) {
                    Some(b) => log_add_exp(a, b),
                    None => a,
                };
                (-total).max(0.0)
            }
        })
    }
}

/// `ln` of the probability of the shortest single-qubit chains spanning a
/// displacement: `C(L, lx)·p1^L`.
fn ln_p1(l: u64, lx: u64, p1: f64) -> f64 {
    ln_binomial(l, lx) + l as f64 * p1.ln()
}

/// `ln` of the diagonal two-qubit chain probability `C(lm, (lx+lz)/2)·p2^lm`,
/// absent when `lx + lz` is odd.
fn ln_p2(lx: u64, lz: u64, p2: f64) -> Option<f64> {
    if (lx + lz) % 2 == 1 {
        return None;
    }
    let lm = lx.max(lz);
    Some(ln_binomial(lm, (lx + lz) / 2) + lm as f64 * p2.ln())
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Metric named in a configuration, resolved against a code and noise model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Manhattan,
    WeightedManhattan,
    Dijkstra,
    Degeneracy,
    DegeneracyLiteral,
    DegeneracyCorrelation,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Manhattan => "manhattan",
            MetricKind::WeightedManhattan => "weighted_manhattan",
            MetricKind::Dijkstra => "dijkstra",
            MetricKind::Degeneracy => "degeneracy",
            MetricKind::DegeneracyLiteral => "degeneracy_literal",
            MetricKind::DegeneracyCorrelation => "degeneracy_correlation",
        }
    }

    /// Parameters are estimated from the noise model:
    /// * weighted Manhattan: `w = −ln` of the mean rate of the letter that moves
    ///   a defect along that axis, averaged over detector edges of that axis;
    /// * degeneracy: `p1` is the mean single-qubit flip probability per
    ///   sub-lattice; `p2` is the per-edge pair rate split over the two
    ///   orientations (each of which moves one sub-lattice).
    pub fn resolve(self, code: &CodeLayout, noise: &NoiseModel) -> Result<WeightMetric> {
        let metric = match self {
            MetricKind::Manhattan => WeightMetric::Manhattan,
            MetricKind::Dijkstra => WeightMetric::Dijkstra,
            MetricKind::DegeneracyLiteral => WeightMetric::DegeneracyLiteral,
            MetricKind::WeightedManhattan => {
                let (wx, wz) = axis_weights(code, noise);
                WeightMetric::WeightedManhattan { wx, wz }
            }
            MetricKind::Degeneracy => WeightMetric::Degeneracy { p1: mean_flip_probability(code, noise) },
            MetricKind::DegeneracyCorrelation => {
                let p1 = mean_flip_probability(code, noise);
                let p2 = noise.pair_channel.map_or(PROB_FLOOR, |pc| pc.p2 / 2.0);
                WeightMetric::DegeneracyPlusCorrelation { p1, p2: p2.max(PROB_FLOOR) }
            }
        };
        metric.validate()?;
        Ok(metric)
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "manhattan" => MetricKind::Manhattan,
            "weighted_manhattan" => MetricKind::WeightedManhattan,
            "dijkstra" => MetricKind::Dijkstra,
            "degeneracy" => MetricKind::Degeneracy,
            "degeneracy_literal" => MetricKind::DegeneracyLiteral,
            "degeneracy_correlation" => MetricKind::DegeneracyCorrelation,
            other => return Err(Error::Parse(format!("unknown metric {other:?}"))),
        })
    }
}

fn mean_flip_probability(code: &CodeLayout, noise: &NoiseModel) -> f64 {
    let n = code.num_qubits();
    let sum: f64 = (0..n)
        .flat_map(|q| Sublattice::BOTH.map(|s| sublattice_flip_probability(noise, q, code, s)))
        .sum();
    (sum / (2 * n) as f64).clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}

fn axis_weights(code: &CodeLayout, noise: &NoiseModel) -> (f64, f64) {
    let mut acc = [(0.0, 0usize); 2];
    for sub in Sublattice::BOTH {
        let g = code.lattice().sublattice(sub);
        for e in &g.edges {
            let letter = code.step_letter(e.qubit, sub);
            let k = match e.axis {
                Axis::X => 0,
                Axis::Z => 1,
            };
            acc[k].0 += noise.per_qubit[e.qubit].rate(letter);
            acc[k].1 += 1;
        }
    }
    let w = |(s, c): (f64, usize)| -(s / c.max(1) as f64).max(PROB_FLOOR).ln();
    (w(acc[0]), w(acc[1]))
}

/// Defect pairing and the Pauli correction built from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    pub op: PauliOperator,
    /// Stabilizer ids of matched defects; `None` means the boundary.
    pub matched_pairs: Vec<(usize, Option<usize>)>,
}

/// Matching graph of one sub-lattice: defects `0..k`, then one virtual
/// boundary node per defect.
#[derive(Clone, Debug, PartialEq)]
pub struct SublatticeMatching {
    pub sublattice: Sublattice,
    /// Stabilizer id of each defect node.
    pub defects: Vec<usize>,
    pub graph: MatchingGraph,
}

struct SubContext {
    /// Path cost of each detector edge.
    edge_cost: Vec<f64>,
    /// Letter applied when a chain crosses each qubit.
    step: Vec<Pauli>,
    /// Closed-form boundary weight and side per cell.
    boundary: Vec<(f64, Side)>,
}

/// Decoder for a fixed code, metric and (for noise-aware metrics) noise model.
pub struct Decoder<'a> {
    code: &'a CodeLayout,
    metric: WeightMetric,
    subs: [SubContext; 2],
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem {
    cost: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on cost, ties to the smaller node index.
        other.cost.total_cmp(&self.cost).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest paths. Boundary nodes other than the source are
/// reached but never expanded, so paths cannot run along a boundary. Stops
/// early once `target` is settled.
fn dijkstra(g: &SublatticeGraph, cost: &[f64], source: usize, target: Option<usize>) -> (Vec<f64>, Vec<usize>) {
    let n = g.num_nodes();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::from([HeapItem { cost: 0.0, node: source }]);
    while let Some(HeapItem { cost: d, node: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if Some(u) == target {
            break;
        }
        if u >= g.num_cells() && u != source {
            continue;
        }
        for &e in &g.adjacency[u] {
            let v = g.other_end(e, u);
            let nd = d + cost[e];
            if nd < dist[v] {
                dist[v] = nd;
                prev[v] = e;
                heap.push(HeapItem { cost: nd, node: v });
            }
        }
    }
    (dist, prev)
}

impl<'a> Decoder<'a> {
    /// `noise` is required for `Dijkstra`; other metrics ignore it.
    pub fn new(code: &'a CodeLayout, metric: WeightMetric, noise: Option<&NoiseModel>) -> Result<Self> {
        metric.validate()?;
        if metric == WeightMetric::Dijkstra {
            let noise = noise.ok_or_else(|| Error::InvalidMetric("dijkstra metric needs a noise model".into()))?;
            if noise.num_qubits() != code.num_qubits() {
                return Err(Error::LengthMismatch { left: noise.num_qubits(), right: code.num_qubits() });
            }
        }
        let build = |sub: Sublattice| -> SubContext {
            let g = code.lattice().sublattice(sub);
            let edge_cost: Vec<f64> = g
                .edges
                .iter()
                .map(|e| match metric {
                    WeightMetric::Dijkstra => {
                        let p = sublattice_flip_probability(noise.expect("checked"), e.qubit, code, sub);
                        -p.clamp(PROB_FLOOR, 1.0).ln()
                    }
                    WeightMetric::WeightedManhattan { wx, wz } => match e.axis {
                        Axis::X => wx,
                        Axis::Z => wz,
                    },
                    _ => 1.0,
                })
                .collect();
            let step = (0..code.num_qubits()).map(|q| code.step_letter(q, sub)).collect();
            let from_sides = (metric == WeightMetric::Dijkstra).then(|| {
                Side::BOTH.map(|side| dijkstra(g, &edge_cost, g.node_index(Node::Boundary(side)), None).0)
            });
            let boundary = (0..g.num_cells())
                .map(|c| match &from_sides {
                    Some([lo, hi]) => {
                        if hi[c] < lo[c] {
                            (hi[c], Side::High)
                        } else {
                            (lo[c], Side::Low)
                        }
                    }
                    None => g
                        .virtual_boundaries
                        .iter()
                        .map(|v| {
                            let w = metric
                                .displacement_weight(Displacement::between(g.coords[c], v.coord))
                                .expect("closed-form metric");
                            (w, v.side)
                        })
                        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                        .expect("boundary present"),
                })
                .collect();
            SubContext { edge_cost, step, boundary }
        };
        Ok(Decoder { code, metric, subs: [build(Sublattice::Primal), build(Sublattice::Dual)] })
    }

    pub fn metric(&self) -> WeightMetric {
        self.metric
    }

    /// Weight between two stabilizers of one sub-lattice, or from `a` to its
    /// nearest absorbing boundary when `b` is `None`.
    pub fn edge_weight(&self, a: usize, b: Option<usize>) -> Result<f64> {
        let lattice = self.code.lattice();
        let sa = &lattice.stabilizers[a];
        let ctx = &self.subs[sa.sublattice.index()];
        let Some(b) = b else { return Ok(ctx.boundary[sa.local].0) };
        let sb = &lattice.stabilizers[b];
        if sa.sublattice != sb.sublattice {
            return Err(Error::SublatticeMismatch);
        }
        Ok(self.pair_weights(sa.sublattice, &[sa.local, sb.local])[0][1])
    }

    /// Pairwise weights between cells (local indices) of one sub-lattice.
    fn pair_weights(&self, sub: Sublattice, cells: &[usize]) -> Vec<Vec<f64>> {
        let g = self.code.lattice().sublattice(sub);
        let k = cells.len();
        let mut w = vec![vec![0.0; k]; k];
        match self.metric {
            WeightMetric::Dijkstra => {
                let cost = &self.subs[sub.index()].edge_cost;
                for i in 0..k {
                    let (dist, _) = dijkstra(g, cost, cells[i], None);
                    for j in 0..k {
                        w[i][j] = dist[cells[j]];
                    }
                }
                // Symmetrize against floating-point path-order effects.
                for i in 0..k {
                    for j in i + 1..k {
                        let m = w[i][j].min(w[j][i]);
                        w[i][j] = m;
                        w[j][i] = m;
                    }
                }
            }
            metric => {
                for i in 0..k {
                    for j in i + 1..k {
                        let d = Displacement::between(g.coords[cells[i]], g.coords[cells[j]]);
                        let x = metric.displacement_weight(d).expect("closed-form metric");
                        w[i][j] = x;
                        w[j][i] = x;
                    }
                }
            }
        }
        w
    }

    fn defects_of(&self, syndrome: &Syndrome, sub: Sublattice) -> Vec<usize> {
        let g = self.code.lattice().sublattice(sub);
        g.cells.iter().enumerate().filter(|(_, &s)| syndrome.bits()[s]).map(|(c, _)| c).collect()
    }

    /// Full matching graphs: defects, one private boundary node per defect,
    /// zero-weight edges among the boundary nodes.
    pub fn build_matching_graph(&self, syndrome: &Syndrome) -> Result<[SublatticeMatching; 2]> {
        self.check_syndrome(syndrome)?;
        Ok(Sublattice::BOTH.map(|sub| {
            let g = self.code.lattice().sublattice(sub);
            let cells = self.defects_of(syndrome, sub);
            let k = cells.len();
            let w = self.pair_weights(sub, &cells);
            let mut graph = MatchingGraph::new(2 * k);
            for i in 0..k {
                for j in i + 1..k {
                    graph.add_edge(i, j, w[i][j]);
                    graph.add_edge(k + i, k + j, 0.0);
                }
                graph.add_edge(i, k + i, self.subs[sub.index()].boundary[cells[i]].0);
            }
            SublatticeMatching { sublattice: sub, defects: cells.iter().map(|&c| g.cells[c]).collect(), graph }
        }))
    }

    fn check_syndrome(&self, syndrome: &Syndrome) -> Result<()> {
        if syndrome.len() != self.code.num_stabilizers() {
            return Err(Error::LengthMismatch { left: syndrome.len(), right: self.code.num_stabilizers() });
        }
        Ok(())
    }

    /// Optimal pairing of the defects of one sub-lattice (local cell indices),
    /// solved as a maximum-weight matching of the savings `b_i + b_j − w_ij`
    /// over boundary matching; unmatched defects go to the boundary.
    fn pair_defects(&self, sub: Sublattice, cells: &[usize]) -> Result<Vec<(usize, Option<usize>)>> {
        let k = cells.len();
        if k == 0 {
            return Ok(Vec::new());
        }
        let ctx = &self.subs[sub.index()];
        let w = self.pair_weights(sub, cells);
        let b: Vec<i64> = cells.iter().map(|&c| quantize(ctx.boundary[c].0)).collect::<Result<_>>()?;
        let mut edges = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                let gain = b[i] + b[j] - quantize(w[i][j])?;
                if gain > 0 {
                    edges.push((i, j, gain));
                }
            }
        }
        let mate = max_weight_matching(k, &edges, false);
        Ok((0..k)
            .filter_map(|i| match mate[i] {
                Some(j) if j > i => Some((cells[i], Some(cells[j]))),
                Some(_) => None,
                None => Some((cells[i], None)),
            })
            .collect())
    }

    fn lay_chain(&self, sub: Sublattice, from: usize, to: Option<usize>, op: &mut PauliOperator) {
        let g = self.code.lattice().sublattice(sub);
        let ctx = &self.subs[sub.index()];
        let target = match to {
            Some(c) => c,
            None => g.node_index(Node::Boundary(ctx.boundary[from].1)),
        };
        let (_, prev) = dijkstra(g, &ctx.edge_cost, from, Some(target));
        let mut v = target;
        while v != from {
            let e = prev[v];
            let q = g.edges[e].qubit;
            op.apply(q, ctx.step[q]);
            v = g.other_end(e, v);
        }
    }

    pub fn decode(&self, syndrome: &Syndrome) -> Result<Correction> {
        self.check_syndrome(syndrome)?;
        let mut op = PauliOperator::identity(self.code.num_qubits());
        let mut matched_pairs = Vec::new();
        for sub in Sublattice::BOTH {
            let g = self.code.lattice().sublattice(sub);
            let cells = self.defects_of(syndrome, sub);
            for (a, b) in self.pair_defects(sub, &cells)? {
                self.lay_chain(sub, a, b, &mut op);
                matched_pairs.push((g.cells[a], b.map(|c| g.cells[c])));
            }
        }
        Ok(Correction { op, matched_pairs })
    }

    /// Edge-list dumps of both matching graphs with the chosen matching.
    pub fn dump(&self, syndrome: &Syndrome) -> Result<String> {
        let mut out = String::new();
        for m in self.build_matching_graph(syndrome)? {
            let pairs = min_weight_perfect_matching(&m.graph)?;
            out.push_str(&format!("# {:?} defects {:?}\n", m.sublattice, m.defects));
            out.push_str(&m.graph.dump(&pairs));
        }
        Ok(out)
    }
}

/// Convenience wrapper building a one-off decoder.
pub fn decode(
    syndrome: &Syndrome,
    code: &CodeLayout,
    metric: WeightMetric,
    noise: Option<&NoiseModel>,
) -> Result<Correction> {
    Decoder::new(code, metric, noise)?.decode(syndrome)
}
