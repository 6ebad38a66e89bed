//! Monte Carlo sweeps over code sizes and physical error rates.

mod fit;
mod io;
mod studies;

pub use fit::{fit_threshold, subthreshold_scan, FitPoint, SlopeFit, ThresholdFit};
pub use io::{read_csv, write_csv, write_manifest, Manifest};
pub use studies::{degeneracy_panels, degeneracy_study, DegeneracyPanel, DegeneracyRow, ErrorKind};

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{build_family, CodeFamily, CodeLayout};
use crate::decoder::{Decoder, MetricKind};
use crate::error::{Error, Result};
use crate::geometry::{build_lattice, Lattice, LatticeSpec, Layout};
use crate::noise::{
    derive_seed, make_gaussian, make_iid, make_toy_permutation, sample_error, Bias, NoiseKind, NoiseModel,
    PairChannel, PairKind,
};
use crate::pauli::{classify, extract_syndrome, LogicalClass};

pub const VERSION: &str = concat!("tailored-surface ", env!("CARGO_PKG_VERSION"));

/// Lattice size in a configuration: a single distance or `[d1, d2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeSize {
    Square(usize),
    Rect([usize; 2]),
}

impl LatticeSize {
    pub fn dims(self) -> (usize, usize) {
        match self {
            LatticeSize::Square(d) => (d, d),
            LatticeSize::Rect([a, b]) => (a, b),
        }
    }
}

fn default_layout() -> Layout {
    Layout::NonRotated
}

fn default_pxx() -> f64 {
    0.5
}

/// Noise family of a sweep; the physical rate `p` comes from the sweep grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Relative X, Y, Z weights for `iid`; depolarizing when absent.
    #[serde(default)]
    pub bias: Option<[f64; 3]>,
    /// Fractions of the single-qubit rate given to the low, medium and high
    /// letters for `toy`.
    #[serde(default)]
    pub toy_ratios: Option<[f64; 3]>,
    #[serde(default)]
    pub sigma_p: f64,
    #[serde(default)]
    pub sigma_tot: f64,
    #[serde(default)]
    pub pair_kind: Option<PairKind>,
    /// Explicit per-edge pair rate.
    #[serde(default)]
    pub p2: Option<f64>,
    /// When set, single-qubit errors get `p1_fraction·p` and the pair rate is
    /// chosen so the expected number of affected qubits per qubit is `p`.
    #[serde(default)]
    pub p1_fraction: Option<f64>,
    #[serde(default = "default_pxx")]
    pub pxx: f64,
}

impl NoiseSpec {
    pub fn iid(bias: Bias) -> Self {
        NoiseSpec {
            kind: NoiseKind::Iid,
            bias: Some([bias.rx, bias.ry, bias.rz]),
            toy_ratios: None,
            sigma_p: 0.0,
            sigma_tot: 0.0,
            pair_kind: None,
            p2: None,
            p1_fraction: None,
            pxx: 0.5,
        }
    }

    pub fn depolarizing() -> Self {
        Self::iid(Bias::depolarizing())
    }

    pub fn gaussian(sigma_p: f64, sigma_tot: f64) -> Self {
        NoiseSpec { kind: NoiseKind::Gaussian, bias: None, sigma_p, sigma_tot, ..Self::depolarizing() }
    }

    /// Single-qubit depolarizing at `fraction·p` plus pair errors filling the
    /// rest of the budget.
    pub fn combined(fraction: f64, kind: PairKind) -> Self {
        NoiseSpec { pair_kind: Some(kind), p1_fraction: Some(fraction), ..Self::depolarizing() }
    }

    /// Whether every trial draws its own realization.
    pub fn is_disordered(&self) -> bool {
        match self.kind {
            NoiseKind::Iid => false,
            NoiseKind::Toy => true,
            NoiseKind::Gaussian => self.sigma_p > 0.0 || self.sigma_tot > 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidExperiment(m));
        if !(self.sigma_p.is_finite() && self.sigma_p >= 0.0) {
            return bad(format!("noise.sigma_p = {} must be nonnegative", self.sigma_p));
        }
        if !(self.sigma_tot.is_finite() && self.sigma_tot >= 0.0) {
            return bad(format!("noise.sigma_tot = {} must be nonnegative", self.sigma_tot));
        }
        if let Some(b) = self.bias {
            if b.iter().any(|&v| v < 0.0) || (b.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return bad(format!("noise.bias = {b:?} must be nonnegative and sum to 1"));
            }
        }
        if self.kind == NoiseKind::Toy {
            let Some(r) = self.toy_ratios else { return bad("noise.toy_ratios is required for toy noise".into()) };
            if r.iter().any(|&v| v < 0.0) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-9 || !(r[0] <= r[1] && r[1] <= r[2]) {
                return bad(format!("noise.toy_ratios = {r:?} must be ascending, nonnegative and sum to 1"));
            }
        }
        if let Some(p2) = self.p2 {
            if !(0.0..=1.0).contains(&p2) {
                return bad(format!("noise.p2 = {p2} must lie in [0, 1]"));
            }
        }
        if let Some(f) = self.p1_fraction {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("noise.p1_fraction = {f} must lie in [0, 1]"));
            }
            if self.pair_kind.is_none() {
                return bad("noise.p1_fraction needs noise.pair_kind".into());
            }
            if self.p2.is_some() {
                return bad("noise.p2 and noise.p1_fraction are mutually exclusive".into());
            }
        }
        if !(0.0..=1.0).contains(&self.pxx) {
            return bad(format!("noise.pxx = {} must lie in [0, 1]", self.pxx));
        }
        Ok(())
    }

    /// Single-qubit rate and per-edge pair rate at physical rate `p`.
    pub fn split(&self, p: f64, lattice: &Lattice) -> (f64, f64) {
        match self.p1_fraction {
            Some(f) => {
                let p1 = f * p;
                let avg_degree = 2.0 * lattice.neighbor_pairs.len() as f64 / lattice.num_qubits() as f64;
                (p1, (p - p1) / avg_degree)
            }
            None => (p, self.p2.unwrap_or(0.0)),
        }
    }

    /// Build one realization at physical rate `p`.
    pub fn realize(&self, p: f64, lattice: &Lattice, seed: u64) -> Result<NoiseModel> {
        let n = lattice.num_qubits();
        let (p1, p2) = self.split(p, lattice);
        let mut model = match self.kind {
            NoiseKind::Iid => {
                let b = self.bias.unwrap_or([1.0 / 3.0; 3]);
                make_iid(p1, Bias::new(b[0], b[1], b[2]), n)?
            }
            NoiseKind::Toy => {
                let r = self.toy_ratios.expect("validated");
                make_toy_permutation(r[0] * p1, r[1] * p1, r[2] * p1, n, seed)?
            }
            NoiseKind::Gaussian => make_gaussian(p1, self.sigma_p, self.sigma_tot, n, seed)?,
        };
        model.descriptor.p = p;
        if let Some(kind) = self.pair_kind {
            model = model.with_pair_channel(PairChannel { kind, p2, pxx: self.pxx })?;
        }
        Ok(model)
    }
}

/// One sweep: a code family and metric over a grid of sizes and rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub family: CodeFamily,
    #[serde(default = "default_layout")]
    pub layout: Layout,
    pub distances: Vec<LatticeSize>,
    pub noise: NoiseSpec,
    pub metric: MetricKind,
    pub p: Vec<f64>,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidExperiment(m));
        if self.family == CodeFamily::Custom {
            return bad("family = custom cannot be swept".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.distances.is_empty() {
            return bad("distances must not be empty".into());
        }
        for d in &self.distances {
            let (d1, d2) = d.dims();
            LatticeSpec::new(d1, d2, self.layout).validate()?;
        }
        if self.p.is_empty() {
            return bad("p must not be empty".into());
        }
        for (i, &p) in self.p.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return bad(format!("p[{i}] = {p} must lie in [0, 1]"));
            }
        }
        if self.p.windows(2).any(|w| w[0] >= w[1]) {
            return bad("p must be strictly increasing".into());
        }
        self.noise.validate()
    }

    fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("{}-{}", self.family.name(), self.metric.name()))
    }
}

/// Tally of one (size, rate) point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub family: String,
    pub metric: String,
    pub d1: usize,
    pub d2: usize,
    pub p: f64,
    pub sigma_p: f64,
    pub sigma_tot: f64,
    pub pair_kind: String,
    pub p2: f64,
    pub trials: u64,
    pub failures: u64,
    pub p_fail: f64,
    pub stderr: f64,
    pub seed: u64,
    pub layout: String,
    pub x_flips: u64,
    pub z_flips: u64,
    pub y_flips: u64,
}

impl PointResult {
    pub fn distance(&self) -> usize {
        self.d1.min(self.d2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub version: String,
    pub spec: ExperimentSpec,
    pub points: Vec<PointResult>,
}

/// Binomial standard error of `k` failures in `n` trials.
pub fn binomial_stderr(k: u64, n: u64) -> f64 {
    let p = k as f64 / n as f64;
    (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Clone, Copy, Default, Debug, PartialEq, Eq)]
struct Tally {
    counts: [u64; 4],
}

impl Tally {
    fn add(mut self, c: LogicalClass) -> Self {
        let k = match c {
            LogicalClass::None => 0,
            LogicalClass::XbarFlip => 1,
            LogicalClass::ZbarFlip => 2,
            LogicalClass::YbarFlip => 3,
        };
        self.counts[k] += 1;
        self
    }

    fn merge(mut self, o: Tally) -> Self {
        for k in 0..4 {
            self.counts[k] += o.counts[k];
        }
        self
    }
}

/// Code, noise and decoder shared by trials that do not redraw disorder.
struct Fixed {
    noise: NoiseModel,
    code: CodeLayout,
}

fn build_code(spec: &ExperimentSpec, lattice: &Arc<Lattice>, noise: &NoiseModel) -> Result<CodeLayout> {
    build_family(spec.family, lattice.clone(), Some(noise))
}

fn decode_once(code: &CodeLayout, noise: &NoiseModel, dec: &Decoder, seed: u64) -> Result<LogicalClass> {
    let error = sample_error(noise, code.lattice(), seed);
    let syndrome = extract_syndrome(&error, code)?;
    let correction = dec.decode(&syndrome)?;
    let residual = error.compose(&correction.op)?;
    classify(&residual, code.logicals())
}

/// Run `trials` trials at one point.
fn run_point(spec: &ExperimentSpec, lattice: &Arc<Lattice>, p: f64, trials: u64) -> Result<Tally> {
    let (d1, d2) = (lattice.spec.d1, lattice.spec.d2);
    let point_seed = derive_seed(&[spec.seed, d1 as u64, d2 as u64, p.to_bits()]);
    let wrap = |t: u64, e: Error| Error::Trial { d1, d2, p, trial: t, source: Box::new(e) };
    let fixed = if spec.noise.is_disordered() {
        None
    } else {
        let noise = spec.noise.realize(p, lattice, point_seed)?;
        let code = build_code(spec, lattice, &noise)?;
        Some(Fixed { noise, code })
    };
    let fixed_decoder = match &fixed {
        Some(f) => {
            let metric = spec.metric.resolve(&f.code, &f.noise)?;
            Some(Decoder::new(&f.code, metric, Some(&f.noise))?)
        }
        None => None,
    };
    (0..trials)
        .into_par_iter()
        .try_fold(Tally::default, |acc, t| -> Result<Tally> {
            let trial_seed = derive_seed(&[point_seed, t]);
            let class = match (&fixed, &fixed_decoder) {
                (Some(f), Some(dec)) => decode_once(&f.code, &f.noise, dec, trial_seed),
                _ => (|| {
                    let noise = spec.noise.realize(p, lattice, derive_seed(&[trial_seed, 0]))?;
                    let code = build_code(spec, lattice, &noise)?;
                    let metric = spec.metric.resolve(&code, &noise)?;
                    let dec = Decoder::new(&code, metric, Some(&noise))?;
                    decode_once(&code, &noise, &dec, derive_seed(&[trial_seed, 1]))
                })(),
            }
            .map_err(|e| wrap(t, e))?;
            Ok(acc.add(class))
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
}

/// Run every (size, rate) point of `spec`. Output is a pure function of the
/// spec, independent of the thread count.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut points = Vec::with_capacity(spec.distances.len() * spec.p.len());
    for size in &spec.distances {
        let (d1, d2) = size.dims();
        let lattice = Arc::new(build_lattice(LatticeSpec::new(d1, d2, spec.layout))?);
        for &p in &spec.p {
            let tally = run_point(spec, &lattice, p, spec.trials)?;
            let failures = spec.trials - tally.counts[0];
            let (_, p2) = spec.noise.split(p, &lattice);
            log::info!(
                "{} d=({d1},{d2}) p={p:.4}: {failures}/{} failures",
                spec.label(),
                spec.trials
            );
            points.push(PointResult {
                family: spec.family.name().to_string(),
                metric: spec.metric.name().to_string(),
                d1,
                d2,
                p,
                sigma_p: spec.noise.sigma_p,
                sigma_tot: spec.noise.sigma_tot,
                pair_kind: spec.noise.pair_kind.map_or("none", |k| k.name()).to_string(),
                p2: if spec.noise.pair_kind.is_some() { p2 } else { 0.0 },
                trials: spec.trials,
                failures,
                p_fail: failures as f64 / spec.trials as f64,
                stderr: binomial_stderr(failures, spec.trials),
                seed: spec.seed,
                layout: match spec.layout {
                    Layout::NonRotated => "non_rotated".into(),
                    Layout::Rotated => "rotated".into(),
                },
                x_flips: tally.counts[1],
                z_flips: tally.counts[2],
                y_flips: tally.counts[3],
            });
        }
    }
    Ok(SweepResult { version: VERSION.to_string(), spec: spec.clone(), points })
}
