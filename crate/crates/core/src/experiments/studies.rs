//! Manhattan against degeneracy-aware matching on both layouts.

use serde::{Deserialize, Serialize};

use super::{run_sweep, ExperimentSpec, LatticeSize, NoiseSpec, PointResult};
use crate::code::CodeFamily;
use crate::decoder::MetricKind;
use crate::error::Result;
use crate::geometry::Layout;
use crate::noise::PairKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Single-qubit depolarizing noise.
    Single,
    /// XZ errors on nearest-neighbour pairs only.
    Pair,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyPanel {
    pub layout: Layout,
    pub error: ErrorKind,
    pub p: f64,
}

impl DegeneracyPanel {
    pub fn label(&self) -> String {
        let layout = match self.layout {
            Layout::NonRotated => "non_rotated",
            Layout::Rotated => "rotated",
        };
        let err = match self.error {
            ErrorKind::Single => "single",
            ErrorKind::Pair => "pair",
        };
        format!("{layout}-{err}")
    }

    /// The sweep behind one side of the comparison.
    pub fn sweep(&self, distances: &[usize], metric: MetricKind, trials: u64, seed: u64) -> ExperimentSpec {
        let noise = match self.error {
            ErrorKind::Single => NoiseSpec::depolarizing(),
            ErrorKind::Pair => NoiseSpec::combined(0.0, PairKind::Xz),
        };
        ExperimentSpec {
            name: Some(self.label()),
            family: CodeFamily::Xzzx,
            layout: self.layout,
            distances: distances.iter().map(|&d| LatticeSize::Square(d)).collect(),
            noise,
            metric,
            p: vec![self.p],
            trials,
            seed,
        }
    }
}

/// The four (layout, error kind) panels with their physical rates.
pub fn degeneracy_panels() -> [DegeneracyPanel; 4] {
    [
        DegeneracyPanel { layout: Layout::NonRotated, error: ErrorKind::Single, p: 0.1 },
        DegeneracyPanel { layout: Layout::Rotated, error: ErrorKind::Single, p: 0.1 },
        DegeneracyPanel { layout: Layout::NonRotated, error: ErrorKind::Pair, p: 0.1 },
        DegeneracyPanel { layout: Layout::Rotated, error: ErrorKind::Pair, p: 0.05 },
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyRow {
    pub panel: String,
    pub d: usize,
    /// Result without the degeneracy term.
    pub plain: PointResult,
    /// Result with it.
    pub aware: PointResult,
}

impl DegeneracyRow {
    /// Plain minus degeneracy-aware failure rate in units of the combined error.
    pub fn gain_sigmas(&self) -> f64 {
        let se = (self.plain.stderr.powi(2) + self.aware.stderr.powi(2)).sqrt();
        let diff = self.plain.p_fail - self.aware.p_fail;
        if se == 0.0 {
            if diff == 0.0 { 0.0 } else { diff.signum() * f64::INFINITY }
        } else {
            diff / se
        }
    }
}

/// Run one panel under a `(plain, aware)` metric pair on identical error
/// samples. The usual pair is Manhattan against `DegeneracyLiteral`: with
/// pair-only noise the single-qubit rate is zero and the `−ln P1` form
/// reduces to scaled Manhattan.
pub fn degeneracy_study(
    panel: DegeneracyPanel,
    metrics: (MetricKind, MetricKind),
    distances: &[usize],
    trials: u64,
    seed: u64,
) -> Result<Vec<DegeneracyRow>> {
    let plain = run_sweep(&panel.sweep(distances, metrics.0, trials, seed))?;
    let aware = run_sweep(&panel.sweep(distances, metrics.1, trials, seed))?;
    Ok(plain
        .points
        .into_iter()
        .zip(aware.points)
        .map(|(m, g)| DegeneracyRow { panel: panel.label(), d: m.d1, plain: m, aware: g })
        .collect())
}
