//! Surface-code lattices: qubit and stabilizer indexing, sub-lattice grids,
//! detector graphs and open boundaries.
//!
//! Non-rotated lattices live on a doubled grid with `2*d2-1` rows and
//! `2*d1-1` columns. Sites with even `row+col` are qubits; primal cells sit at
//! (even row, odd col) and dual cells at (odd row, even col). Primal defects
//! are absorbed by the left/right edges, dual defects by the top/bottom edges.
//!
//! Rotated lattices carry `d1*d2` qubits on integer points `(i, j)` and
//! stabilizers on faces in a checkerboard, with weight-2 cells on the edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    NonRotated,
    Rotated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    /// Horizontal extent (vertex count / qubit columns).
    pub d1: usize,
    /// Vertical extent.
    pub d2: usize,
    pub layout: Layout,
}

impl LatticeSpec {
    pub fn new(d1: usize, d2: usize, layout: Layout) -> Self {
        LatticeSpec { d1, d2, layout }
    }

    pub fn square(d: usize, layout: Layout) -> Self {
        Self::new(d, d, layout)
    }

    pub fn distance(&self) -> usize {
        self.d1.min(self.d2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d1 < 2 || self.d2 < 2 {
            return Err(Error::InvalidLattice(format!(
                "d1 and d2 must be at least 2, got ({}, {})",
                self.d1, self.d2
            )));
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        match self.layout {
            Layout::NonRotated => non_rotated_qubit_count(self.d1, self.d2),
            Layout::Rotated => self.d1 * self.d2,
        }
    }
}

pub(crate) fn non_rotated_qubit_count(d1: usize, d2: usize) -> usize {
    d1 * d2 + (d1 - 1) * (d2 - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sublattice {
    Primal,
    Dual,
}

impl Sublattice {
    pub const BOTH: [Sublattice; 2] = [Sublattice::Primal, Sublattice::Dual];

    pub fn index(self) -> usize {
        match self {
            Sublattice::Primal => 0,
            Sublattice::Dual => 1,
        }
    }

    pub fn other(self) -> Sublattice {
        match self {
            Sublattice::Primal => Sublattice::Dual,
            Sublattice::Dual => Sublattice::Primal,
        }
    }
}

/// Which of the two absorbing boundaries of a sub-lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Low,
    High,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Low, Side::High];

    pub fn index(self) -> usize {
        match self {
            Side::Low => 0,
            Side::High => 1,
        }
    }
}

/// Direction of a unit step on a sub-lattice grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridCoord {
    pub x: i64,
    pub z: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteIndex {
    pub id: usize,
    /// Position on the doubled grid (`x` = column, `z` = row).
    pub coord: (i64, i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerSite {
    pub id: usize,
    pub sublattice: Sublattice,
    /// Qubit ids, ordered north, west, east, south where present.
    pub support: Vec<usize>,
    /// Position on the sub-lattice grid used for displacements.
    pub coord: GridCoord,
    /// Centre on the doubled grid.
    pub center: (i64, i64),
    /// Index among the cells of its own sub-lattice.
    pub local: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Displacement {
    pub lx: u64,
    pub lz: u64,
}

impl Displacement {
    pub fn new(lx: u64, lz: u64) -> Self {
        Displacement { lx, lz }
    }

    pub fn between(a: GridCoord, b: GridCoord) -> Self {
        Displacement { lx: a.x.abs_diff(b.x), lz: a.z.abs_diff(b.z) }
    }

    pub fn manhattan(&self) -> u64 {
        self.lx + self.lz
    }
}

/// Endpoint of a detector-graph edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    /// Local cell index within the sub-lattice.
    Cell(usize),
    Boundary(Side),
}

/// A qubit seen as an edge of one sub-lattice's detector graph: an error that
/// flips this sub-lattice on the qubit toggles exactly the two endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DetectorEdge {
    pub a: Node,
    pub b: Node,
    pub qubit: usize,
    pub axis: Axis,
}

/// Position just beyond an absorbing boundary, reached from `cell` across a
/// boundary qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VirtualBoundary {
    pub coord: GridCoord,
    pub side: Side,
    pub cell: usize,
    pub edge: usize,
}

#[derive(Clone, Debug)]
pub struct SublatticeGraph {
    pub sublattice: Sublattice,
    /// Stabilizer ids of the cells, indexed by local index.
    pub cells: Vec<usize>,
    pub coords: Vec<GridCoord>,
    pub edges: Vec<DetectorEdge>,
    /// Edge ids incident to each node: cells first, then the Low and High
    /// boundary nodes.
    pub adjacency: Vec<Vec<usize>>,
    pub virtual_boundaries: Vec<VirtualBoundary>,
    /// Edge id carried by each qubit in this sub-lattice.
    pub edge_of_qubit: Vec<usize>,
}

impl SublatticeGraph {
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn node_index(&self, node: Node) -> usize {
        match node {
            Node::Cell(c) => c,
            Node::Boundary(s) => self.cells.len() + s.index(),
        }
    }

    pub fn node_at(&self, index: usize) -> Node {
        let n = self.cells.len();
        if index < n {
            Node::Cell(index)
        } else if index == n {
            Node::Boundary(Side::Low)
        } else {
            Node::Boundary(Side::High)
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.cells.len() + 2
    }

    /// The endpoint of `edge` opposite to node index `from`.
    pub fn other_end(&self, edge: usize, from: usize) -> usize {
        let e = &self.edges[edge];
        let a = self.node_index(e.a);
        if a == from {
            self.node_index(e.b)
        } else {
            a
        }
    }
}

/// Stabilizers adjacent to a qubit. In a consistent deformation the
/// `vertical` neighbours share one letter and the `horizontal` ones the other.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QubitNeighborhood {
    pub vertical: Vec<usize>,
    pub horizontal: Vec<usize>,
    /// Sub-lattice of the vertical neighbours.
    pub vertical_sublattice: Option<Sublattice>,
    /// Two-colouring of qubits used by the checkerboard (XXZZ-like) layouts.
    pub checker: bool,
}

#[derive(Clone, Debug)]
pub struct Lattice {
    pub spec: LatticeSpec,
    pub qubits: Vec<SiteIndex>,
    pub stabilizers: Vec<StabilizerSite>,
    pub neighborhoods: Vec<QubitNeighborhood>,
    /// Unordered nearest-neighbour qubit pairs, `a < b`.
    pub neighbor_pairs: Vec<(usize, usize)>,
    sublattices: [SublatticeGraph; 2],
}

impl Lattice {
    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn num_stabilizers(&self) -> usize {
        self.stabilizers.len()
    }

    pub fn sublattice(&self, s: Sublattice) -> &SublatticeGraph {
        &self.sublattices[s.index()]
    }

    /// Absorbing boundary descriptor: for each sub-lattice the qubits that
    /// touch only one of its cells, with the side they belong to.
    pub fn boundaries(&self, s: Sublattice) -> Vec<(usize, Side)> {
        let g = self.sublattice(s);
        g.virtual_boundaries.iter().map(|v| (g.edges[v.edge].qubit, v.side)).collect()
    }
}

pub fn build_lattice(spec: LatticeSpec) -> Result<Lattice> {
    spec.validate()?;
    match spec.layout {
        Layout::NonRotated => Ok(build_non_rotated(spec)),
        Layout::Rotated => Ok(build_rotated(spec)),
    }
}

struct Raw {
    qubits: Vec<SiteIndex>,
    stabilizers: Vec<StabilizerSite>,
    neighborhoods: Vec<QubitNeighborhood>,
    neighbor_pairs: Vec<(usize, usize)>,
}

fn build_non_rotated(spec: LatticeSpec) -> Lattice {
    let rows = 2 * spec.d2 as i64 - 1;
    let cols = 2 * spec.d1 as i64 - 1;
    let mut qubit_at = std::collections::HashMap::new();
    let mut qubits = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if (r + c) % 2 == 0 {
                qubit_at.insert((c, r), qubits.len());
                qubits.push(SiteIndex { id: qubits.len(), coord: (c, r) });
            }
        }
    }
    let mut stabilizers = Vec::new();
    let mut locals = [0usize; 2];
    for r in 0..rows {
        for c in 0..cols {
            if (r + c) % 2 == 0 {
                continue;
            }
            let sublattice = if r % 2 == 0 { Sublattice::Primal } else { Sublattice::Dual };
            let coord = match sublattice {
                Sublattice::Primal => GridCoord { x: (c - 1) / 2, z: r / 2 },
                Sublattice::Dual => GridCoord { x: c / 2, z: (r - 1) / 2 },
            };
            let support = [(c, r - 1), (c - 1, r), (c + 1, r), (c, r + 1)]
                .iter()
                .filter_map(|k| qubit_at.get(k).copied())
                .collect();
            let local = locals[sublattice.index()];
            locals[sublattice.index()] += 1;
            stabilizers.push(StabilizerSite {
                id: stabilizers.len(),
                sublattice,
                support,
                coord,
                center: (c, r),
                local,
            });
        }
    }
    let stab_at: std::collections::HashMap<(i64, i64), usize> =
        stabilizers.iter().map(|s| (s.center, s.id)).collect();
    let neighborhoods = qubits
        .iter()
        .map(|q| {
            let (c, r) = q.coord;
            let vertical: Vec<usize> =
                [(c, r - 1), (c, r + 1)].iter().filter_map(|k| stab_at.get(k).copied()).collect();
            let horizontal: Vec<usize> =
                [(c - 1, r), (c + 1, r)].iter().filter_map(|k| stab_at.get(k).copied()).collect();
            let vertical_sublattice = Some(if r % 2 == 0 { Sublattice::Dual } else { Sublattice::Primal });
            QubitNeighborhood { vertical, horizontal, vertical_sublattice, checker: ((r + c) / 2) % 2 == 1 }
        })
        .collect();
    let mut neighbor_pairs = Vec::new();
    for q in &qubits {
        let (c, r) = q.coord;
        for (dc, dr) in [(1, 1), (-1, 1)] {
            if let Some(&o) = qubit_at.get(&(c + dc, r + dr)) {
                neighbor_pairs.push((q.id.min(o), q.id.max(o)));
            }
        }
    }
    neighbor_pairs.sort_unstable();
    let raw = Raw { qubits, stabilizers, neighborhoods, neighbor_pairs };
    finish(spec, raw, |s, center| match s {
        Sublattice::Primal => GridCoord { x: (center.0 - 1).div_euclid(2), z: center.1.div_euclid(2) },
        Sublattice::Dual => GridCoord { x: center.0.div_euclid(2), z: (center.1 - 1).div_euclid(2) },
    })
}

fn rotated_grid(center: (i64, i64)) -> GridCoord {
    let i = (center.0 - 1).div_euclid(2);
    let j = (center.1 - 1).div_euclid(2);
    let t = (i + j).rem_euclid(2);
    GridCoord { x: (i + j + t).div_euclid(2), z: (i - j + t).div_euclid(2) }
}

fn build_rotated(spec: LatticeSpec) -> Lattice {
    let (d1, d2) = (spec.d1 as i64, spec.d2 as i64);
    let mut qubits = Vec::new();
    let mut qubit_at = std::collections::HashMap::new();
    for j in 0..d2 {
        for i in 0..d1 {
            qubit_at.insert((i, j), qubits.len());
            qubits.push(SiteIndex { id: qubits.len(), coord: (2 * i, 2 * j) });
        }
    }
    // Face (i, j) spans qubits (i..=i+1, j..=j+1). Even faces are primal; the
    // primal weight-2 cells sit on the top and bottom edges.
    let mut stabilizers = Vec::new();
    let mut locals = [0usize; 2];
    for j in -1..d2 {
        for i in -1..d1 {
            let even = (i + j).rem_euclid(2) == 0;
            let bulk = (0..d1 - 1).contains(&i) && (0..d2 - 1).contains(&j);
            let top_bottom = (j == -1 || j == d2 - 1) && (0..d1 - 1).contains(&i);
            let left_right = (i == -1 || i == d1 - 1) && (0..d2 - 1).contains(&j);
            let keep = bulk || (top_bottom && even) || (left_right && !even);
            if !keep {
                continue;
            }
            let sublattice = if even { Sublattice::Primal } else { Sublattice::Dual };
            // north-west, north-east, south-west, south-east with rows growing south
            let support: Vec<usize> = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
                .iter()
                .filter_map(|k| qubit_at.get(k).copied())
                .collect();
            let center = (2 * i + 1, 2 * j + 1);
            let local = locals[sublattice.index()];
            locals[sublattice.index()] += 1;
            stabilizers.push(StabilizerSite {
                id: stabilizers.len(),
                sublattice,
                support,
                coord: rotated_grid(center),
                center,
                local,
            });
        }
    }
    let neighborhoods = qubits
        .iter()
        .map(|q| {
            let (i, j) = (q.coord.0 / 2, q.coord.1 / 2);
            let touching = stabilizers.iter().filter(|s| s.support.contains(&q.id));
            let vertical_sublattice =
                if (i + j) % 2 == 0 { Sublattice::Primal } else { Sublattice::Dual };
            let (mut vertical, mut horizontal) = (Vec::new(), Vec::new());
            for s in touching {
                if s.sublattice == vertical_sublattice {
                    vertical.push(s.id);
                } else {
                    horizontal.push(s.id);
                }
            }
            QubitNeighborhood {
                vertical,
                horizontal,
                vertical_sublattice: Some(vertical_sublattice),
                checker: i % 2 == 1,
            }
        })
        .collect();
    let mut neighbor_pairs = Vec::new();
    for j in 0..d2 {
        for i in 0..d1 {
            let q = qubit_at[&(i, j)];
            if let Some(&o) = qubit_at.get(&(i + 1, j)) {
                neighbor_pairs.push((q, o));
            }
            if let Some(&o) = qubit_at.get(&(i, j + 1)) {
                neighbor_pairs.push((q, o));
            }
        }
    }
    neighbor_pairs.sort_unstable();
    let raw = Raw { qubits, stabilizers, neighborhoods, neighbor_pairs };
    finish(spec, raw, |_, center| rotated_grid(center))
}

/// Build detector graphs and boundary descriptors from the raw site lists.
fn finish(spec: LatticeSpec, raw: Raw, grid_of: impl Fn(Sublattice, (i64, i64)) -> GridCoord) -> Lattice {
    let Raw { qubits, stabilizers, neighborhoods, neighbor_pairs } = raw;
    let n = qubits.len();
    let mut per_qubit: Vec<[Vec<usize>; 2]> = vec![[Vec::new(), Vec::new()]; n];
    for s in &stabilizers {
        for &q in &s.support {
            per_qubit[q][s.sublattice.index()].push(s.id);
        }
    }
    let (x_mid, z_mid) = match spec.layout {
        Layout::NonRotated => ((spec.d1 as i64 - 1), (spec.d2 as i64 - 1)),
        Layout::Rotated => ((spec.d1 as i64 - 1), (spec.d2 as i64 - 1)),
    };
    let build = |sub: Sublattice| {
        let cells: Vec<usize> =
            stabilizers.iter().filter(|s| s.sublattice == sub).map(|s| s.id).collect();
        let coords: Vec<GridCoord> = cells.iter().map(|&id| stabilizers[id].coord).collect();
        let mut edges = Vec::with_capacity(n);
        let mut virtual_boundaries = Vec::new();
        let mut edge_of_qubit = vec![usize::MAX; n];
        for q in 0..n {
            let touching = &per_qubit[q][sub.index()];
            let edge = match touching.as_slice() {
                [a, b] => {
                    let (ca, cb) = (stabilizers[*a].coord, stabilizers[*b].coord);
                    let axis = if ca.z == cb.z { Axis::X } else { Axis::Z };
                    DetectorEdge {
                        a: Node::Cell(stabilizers[*a].local),
                        b: Node::Cell(stabilizers[*b].local),
                        qubit: q,
                        axis,
                    }
                }
                [a] => {
                    let s = &stabilizers[*a];
                    let qc = qubits[q].coord;
                    let mirrored = (2 * qc.0 - s.center.0, 2 * qc.1 - s.center.1);
                    let coord = grid_of(sub, mirrored);
                    let axis = if coord.z == s.coord.z { Axis::X } else { Axis::Z };
                    // Primal cells are absorbed on the left/right, dual on the top/bottom.
                    let side = match sub {
                        Sublattice::Primal => {
                            if qc.0 < x_mid {
                                Side::Low
                            } else {
                                Side::High
                            }
                        }
                        Sublattice::Dual => {
                            if qc.1 < z_mid {
                                Side::Low
                            } else {
                                Side::High
                            }
                        }
                    };
                    virtual_boundaries.push(VirtualBoundary { coord, side, cell: s.local, edge: edges.len() });
                    DetectorEdge { a: Node::Cell(s.local), b: Node::Boundary(side), qubit: q, axis }
                }
                other => panic!("qubit {q} touches {} cells of one sub-lattice", other.len()),
            };
            edge_of_qubit[q] = edges.len();
            edges.push(edge);
        }
        let mut adjacency = vec![Vec::new(); cells.len() + 2];
        let index = |node: Node| match node {
            Node::Cell(c) => c,
            Node::Boundary(s) => cells.len() + s.index(),
        };
        for (k, e) in edges.iter().enumerate() {
            adjacency[index(e.a)].push(k);
            adjacency[index(e.b)].push(k);
        }
        SublatticeGraph { sublattice: sub, cells, coords, edges, adjacency, virtual_boundaries, edge_of_qubit }
    };
    let sublattices = [build(Sublattice::Primal), build(Sublattice::Dual)];
    Lattice { spec, qubits, stabilizers, neighborhoods, neighbor_pairs, sublattices }
}

/// Rectangle with roughly the qubit count of a distance-`d` square and
/// horizontal-to-vertical ratio `d1/d2` close to `aspect`.
pub fn matched_rectangle(d: usize, aspect: f64) -> LatticeSpec {
    let d = d.max(2);
    let target = non_rotated_qubit_count(d, d);
    let aspect = if aspect.is_finite() && aspect > 0.0 { aspect } else { 1.0 };
    let mut best: Option<(f64, usize, usize)> = None;
    for d2 in 2..=target {
        // Solve d1*d2 + (d1-1)(d2-1) = target for d1.
        let exact = (target + d2 - 1) as f64 / (2 * d2 - 1) as f64;
        let mut row_best: Option<(usize, usize)> = None;
        for d1 in [exact.floor() as usize, exact.ceil() as usize] {
            if d1 < 2 {
                continue;
            }
            let count = non_rotated_qubit_count(d1, d2);
            if count > target + 1 {
                continue;
            }
            let gap = count.abs_diff(target);
            if row_best.is_none_or(|(_, g)| gap < g) {
                row_best = Some((d1, gap));
            }
        }
        let Some((d1, _)) = row_best else { continue };
        let score = ((d1 as f64 / d2 as f64).ln() - aspect.ln()).abs();
        // `<=` keeps the larger d2 on ties.
        if best.is_none_or(|(s, _, _)| score <= s + 1e-12) {
            best = Some((score, d1, d2));
        }
    }
    let (_, d1, d2) = best.expect("d2 = 2 always yields a candidate");
    LatticeSpec::new(d1, d2, Layout::NonRotated)
}

pub fn stabilizer_displacement(a: &StabilizerSite, b: &StabilizerSite) -> Result<Displacement> {
    if a.sublattice != b.sublattice {
        return Err(Error::SublatticeMismatch);
    }
    Ok(Displacement::between(a.coord, b.coord))
}

/// Shortest displacement from a cell to a boundary absorbing its sub-lattice,
/// with the side reached. Ties prefer the low side.
pub fn boundary_distance(lattice: &Lattice, a: &StabilizerSite) -> (Displacement, Side) {
    let g = lattice.sublattice(a.sublattice);
    g.virtual_boundaries
        .iter()
        .map(|v| (Displacement::between(a.coord, v.coord), v.side))
        .min_by_key(|(d, side)| (d.manhattan(), side.index(), d.lx))
        .expect("every sub-lattice has boundary qubits")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes() -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for d1 in 2..=7 {
            for d2 in 2..=7 {
                v.push((d1, d2));
            }
        }
        v
    }

    #[test]
    fn non_rotated_counts() {
        let l = build_lattice(LatticeSpec::square(3, Layout::NonRotated)).unwrap();
        assert_eq!(l.num_qubits(), 13);
        assert_eq!(l.num_stabilizers(), 12);
        let l = build_lattice(LatticeSpec::square(2, Layout::NonRotated)).unwrap();
        assert_eq!((l.num_qubits(), l.num_stabilizers()), (5, 4));
        for (d1, d2) in sizes() {
            let l = build_lattice(LatticeSpec::new(d1, d2, Layout::NonRotated)).unwrap();
            assert_eq!(l.num_qubits(), d1 * d2 + (d1 - 1) * (d2 - 1));
            assert_eq!(l.num_stabilizers(), l.num_qubits() - 1);
            for s in &l.stabilizers {
                assert!((2..=4).contains(&s.support.len()));
            }
        }
    }

    #[test]
    fn rotated_counts() {
        let l = build_lattice(LatticeSpec::square(3, Layout::Rotated)).unwrap();
        assert_eq!((l.num_qubits(), l.num_stabilizers()), (9, 8));
        for (d1, d2) in sizes() {
            let l = build_lattice(LatticeSpec::new(d1, d2, Layout::Rotated)).unwrap();
            assert_eq!(l.num_qubits(), d1 * d2);
            assert_eq!(l.num_stabilizers(), d1 * d2 - 1, "({d1},{d2})");
            for s in &l.stabilizers {
                assert!(s.support.len() == 2 || s.support.len() == 4);
            }
        }
    }

    #[test]
    fn rejects_tiny_lattices() {
        assert!(build_lattice(LatticeSpec::new(1, 3, Layout::NonRotated)).is_err());
        assert!(build_lattice(LatticeSpec::new(3, 1, Layout::Rotated)).is_err());
    }

    #[test]
    fn every_qubit_touches_both_sublattices_at_most_twice() {
        for layout in [Layout::NonRotated, Layout::Rotated] {
            for (d1, d2) in sizes() {
                let l = build_lattice(LatticeSpec::new(d1, d2, layout)).unwrap();
                for q in 0..l.num_qubits() {
                    for sub in Sublattice::BOTH {
                        let k = l
                            .stabilizers
                            .iter()
                            .filter(|s| s.sublattice == sub && s.support.contains(&q))
                            .count();
                        assert!((1..=2).contains(&k), "{layout:?} ({d1},{d2}) qubit {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn interior_qubits_have_two_of_each() {
        let l = build_lattice(LatticeSpec::square(5, Layout::NonRotated)).unwrap();
        let q = l.qubits.iter().find(|q| q.coord == (4, 4)).unwrap().id;
        let nb = &l.neighborhoods[q];
        assert_eq!((nb.vertical.len(), nb.horizontal.len()), (2, 2));
    }

    #[test]
    fn boundary_sides_follow_sublattice() {
        let l = build_lattice(LatticeSpec::new(4, 3, Layout::NonRotated)).unwrap();
        for (q, side) in l.boundaries(Sublattice::Primal) {
            let c = l.qubits[q].coord.0;
            assert!(c == 0 || c == 6);
            assert_eq!(side == Side::Low, c == 0);
        }
        for (q, side) in l.boundaries(Sublattice::Dual) {
            let r = l.qubits[q].coord.1;
            assert!(r == 0 || r == 4);
            assert_eq!(side == Side::Low, r == 0);
        }
    }

    #[test]
    fn detector_graph_edges_are_unit_steps() {
        for layout in [Layout::NonRotated, Layout::Rotated] {
            let l = build_lattice(LatticeSpec::new(5, 4, layout)).unwrap();
            for sub in Sublattice::BOTH {
                let g = l.sublattice(sub);
                for e in &g.edges {
                    if let (Node::Cell(a), Node::Cell(b)) = (e.a, e.b) {
                        assert_eq!(Displacement::between(g.coords[a], g.coords[b]).manhattan(), 1);
                    }
                }
                for v in &g.virtual_boundaries {
                    assert_eq!(Displacement::between(g.coords[v.cell], v.coord).manhattan(), 1);
                }
            }
        }
    }

    #[test]
    fn displacement_examples() {
        let l = build_lattice(LatticeSpec::square(5, Layout::NonRotated)).unwrap();
        let cell = |sub, x, z| {
            l.stabilizers
                .iter()
                .find(|s| s.sublattice == sub && s.coord == GridCoord { x, z })
                .unwrap()
        };
        let a = cell(Sublattice::Primal, 0, 0);
        assert_eq!(stabilizer_displacement(a, a).unwrap(), Displacement::new(0, 0));
        assert_eq!(
            stabilizer_displacement(a, cell(Sublattice::Primal, 1, 0)).unwrap(),
            Displacement::new(1, 0)
        );
        assert_eq!(
            stabilizer_displacement(a, cell(Sublattice::Primal, 2, 3)).unwrap(),
            Displacement::new(2, 3)
        );
        assert!(stabilizer_displacement(a, cell(Sublattice::Dual, 0, 0)).is_err());
    }

    #[test]
    fn boundary_distance_examples() {
        let l = build_lattice(LatticeSpec::square(5, Layout::NonRotated)).unwrap();
        // Primal cells have x in 0..=3, absorbed at x = -1 and x = 4.
        for s in l.stabilizers.iter().filter(|s| s.sublattice == Sublattice::Primal) {
            let (d, _) = boundary_distance(&l, s);
            let expect = (s.coord.x + 1).min(4 - s.coord.x) as u64;
            assert_eq!(d, Displacement::new(expect, 0));
        }
        let edge = l.stabilizers.iter().find(|s| s.sublattice == Sublattice::Dual && s.coord.z == 0).unwrap();
        assert_eq!(boundary_distance(&l, edge).0, Displacement::new(0, 1));
        let l2 = build_lattice(LatticeSpec::square(2, Layout::NonRotated)).unwrap();
        for s in &l2.stabilizers {
            assert_eq!(boundary_distance(&l2, s).0.manhattan(), 1);
        }
    }

    #[test]
    fn matched_rectangle_examples() {
        assert_eq!(matched_rectangle(5, 1.0), LatticeSpec::new(5, 5, Layout::NonRotated));
        assert_eq!(matched_rectangle(2, 1.0), LatticeSpec::new(2, 2, Layout::NonRotated));
        let r = matched_rectangle(5, 3.0);
        assert!(r.num_qubits() <= 41);
        // Frozen from exhaustive search over d1, d2 <= 15.
        let mut best = None;
        for d2 in 2..=15usize {
            let mut row: Option<(usize, usize)> = None;
            for d1 in 2..=15usize {
                let c = non_rotated_qubit_count(d1, d2);
                if c <= 42 && row.is_none_or(|(_, g)| c.abs_diff(41) < g) {
                    row = Some((d1, c.abs_diff(41)));
                }
            }
            if let Some((d1, _)) = row {
                let s = ((d1 as f64 / d2 as f64).ln() - 3f64.ln()).abs();
                if best.is_none_or(|(b, _, _)| s <= b) {
                    best = Some((s, d1, d2));
                }
            }
        }
        let (_, d1, d2) = best.unwrap();
        assert_eq!((r.d1, r.d2), (d1, d2));
        assert_eq!((d1, d2), (8, 3));
    }
}
