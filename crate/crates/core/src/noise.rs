//! Pauli noise channels and error sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::code::CodeLayout;
use crate::error::{Error, Result};
use crate::geometry::{Lattice, Sublattice};
use crate::pauli::{Pauli, PauliOperator};

/// Single-qubit diagonal Pauli rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitRates {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl QubitRates {
    pub fn total(&self) -> f64 {
        self.x + self.y + self.z
    }

    pub fn rate(&self, p: Pauli) -> f64 {
        match p {
            Pauli::I => 1.0 - self.total(),
            Pauli::X => self.x,
            Pauli::Y => self.y,
            Pauli::Z => self.z,
        }
    }

    fn validate(&self, q: usize) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(ok(self.x) && ok(self.y) && ok(self.z)) || self.total() > 1.0 + 1e-12 {
            return Err(Error::InvalidNoise(format!("qubit {q} has rates {self:?}")));
        }
        Ok(())
    }
}

/// Relative weights of X, Y and Z errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bias {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl Bias {
    pub fn new(rx: f64, ry: f64, rz: f64) -> Self {
        Bias { rx, ry, rz }
    }

    pub fn depolarizing() -> Self {
        Bias::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
    }

    pub fn phase_flip() -> Self {
        Bias::new(0.0, 0.0, 1.0)
    }

    /// Z-biased noise with z/x = eta and x = y.
    pub fn from_eta(eta: f64) -> Self {
        let x = 1.0 / (eta + 2.0);
        Bias::new(x, x, eta * x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    /// X⊗X with probability `pxx`, otherwise Z⊗Z.
    XxZz,
    /// X⊗Z or Z⊗X with equal probability.
    Xz,
}

impl PairKind {
    pub fn name(self) -> &'static str {
        match self {
            PairKind::XxZz => "xx_zz",
            PairKind::Xz => "xz",
        }
    }
}

/// Correlated two-qubit channel acting on every nearest-neighbour edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairChannel {
    pub kind: PairKind,
    /// Per-edge probability of a pair error.
    pub p2: f64,
    /// Conditional probability of X⊗X for `XxZz`.
    pub pxx: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Iid,
    Toy,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseDescriptor {
    pub kind: NoiseKind,
    pub p: f64,
    pub sigma_p: f64,
    pub sigma_tot: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub per_qubit: Vec<QubitRates>,
    pub pair_channel: Option<PairChannel>,
    pub descriptor: NoiseDescriptor,
}

impl NoiseModel {
    pub fn num_qubits(&self) -> usize {
        self.per_qubit.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (q, r) in self.per_qubit.iter().enumerate() {
            r.validate(q)?;
        }
        if let Some(pc) = self.pair_channel {
            if !(0.0..=1.0).contains(&pc.p2) || !(0.0..=1.0).contains(&pc.pxx) {
                return Err(Error::InvalidNoise(format!("pair channel out of range: {pc:?}")));
            }
        }
        Ok(())
    }

    pub fn with_pair_channel(mut self, channel: PairChannel) -> Result<Self> {
        self.pair_channel = Some(channel);
        self.validate()?;
        Ok(self)
    }

    /// Mean single-qubit rates over all qubits.
    pub fn mean_rates(&self) -> QubitRates {
        let n = self.per_qubit.len().max(1) as f64;
        let mut acc = QubitRates { x: 0.0, y: 0.0, z: 0.0 };
        for r in &self.per_qubit {
            acc.x += r.x;
            acc.y += r.y;
            acc.z += r.z;
        }
        QubitRates { x: acc.x / n, y: acc.y / n, z: acc.z / n }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidNoise(format!("{name} = {p} is outside [0, 1]")));
    }
    Ok(())
}

/// Identical rates `p·bias` on every qubit.
pub fn make_iid(p: f64, bias: Bias, n: usize) -> Result<NoiseModel> {
    check_probability("p", p)?;
    let sum = bias.rx + bias.ry + bias.rz;
    if (sum - 1.0).abs() > 1e-9 || bias.rx < 0.0 || bias.ry < 0.0 || bias.rz < 0.0 {
        return Err(Error::InvalidNoise(format!("bias ratios must be nonnegative and sum to 1, got {sum}")));
    }
    let rates = QubitRates { x: p * bias.rx, y: p * bias.ry, z: p * bias.rz };
    Ok(NoiseModel {
        per_qubit: vec![rates; n],
        pair_channel: None,
        descriptor: NoiseDescriptor { kind: NoiseKind::Iid, p, sigma_p: 0.0, sigma_tot: 0.0 },
    })
}

/// Each qubit receives the rates {l, m, h} in an independent uniformly random
/// order over {X, Y, Z}.
pub fn make_toy_permutation(l: f64, m: f64, h: f64, n: usize, seed: u64) -> Result<NoiseModel> {
    if !(0.0 <= l && l <= m && m <= h) || l + m + h > 1.0 {
        return Err(Error::InvalidNoise(format!("need 0 <= l <= m <= h and l+m+h <= 1, got ({l}, {m}, {h})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_qubit = (0..n)
        .map(|_| {
            let mut v = [l, m, h];
            // Fisher-Yates over three entries.
            for i in (1..3).rev() {
                let j = rng.gen_range(0..=i);
                v.swap(i, j);
            }
            QubitRates { x: v[0], y: v[1], z: v[2] }
        })
        .collect();
    Ok(NoiseModel {
        per_qubit,
        pair_channel: None,
        descriptor: NoiseDescriptor { kind: NoiseKind::Toy, p: l + m + h, sigma_p: 0.0, sigma_tot: 0.0 },
    })
}

/// Normal(mean, sd) restricted to [0, 1] by rejection; `sd = 0` returns the
/// mean unchanged.
fn truncated_normal<R: Rng + ?Sized>(rng: &mut R, mean: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        return mean;
    }
    let normal = Normal::new(mean, sd).expect("finite positive sd");
    loop {
        let v = normal.sample(rng);
        if (0.0..=1.0).contains(&v) {
            return v;
        }
    }
}

/// Non-identically distributed rates: the Pauli mix varies with `sigma_p` and
/// the total rate with `sigma_tot` (relative to `p`).
pub fn make_gaussian(p: f64, sigma_p: f64, sigma_tot: f64, n: usize, seed: u64) -> Result<NoiseModel> {
    check_probability("p", p)?;
    if sigma_p < 0.0 || sigma_tot < 0.0 || !sigma_p.is_finite() || !sigma_tot.is_finite() {
        return Err(Error::InvalidNoise("sigma values must be finite and nonnegative".into()));
    }
    if p == 0.0 && sigma_tot > 0.0 {
        return Err(Error::InvalidNoise("sigma_tot > 0 needs p > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_qubit = (0..n)
        .map(|_| {
            let (kx, ky, kz) = loop {
                let k = (
                    truncated_normal(&mut rng, 0.5, sigma_p),
                    truncated_normal(&mut rng, 0.5, sigma_p),
                    truncated_normal(&mut rng, 0.5, sigma_p),
                );
                if k.0 + k.1 + k.2 > 0.0 {
                    break k;
                }
            };
            let total = truncated_normal(&mut rng, p, p * sigma_tot);
            let norm = kx + ky + kz;
            QubitRates { x: total * kx / norm, y: total * ky / norm, z: total * kz / norm }
        })
        .collect();
    Ok(NoiseModel {
        per_qubit,
        pair_channel: None,
        descriptor: NoiseDescriptor { kind: NoiseKind::Gaussian, p, sigma_p, sigma_tot },
    })
}

/// Single-qubit depolarizing noise with probability `p1 = fraction·p` plus
/// per-edge pair errors whose rate makes the expected number of affected
/// qubits per qubit equal to `p`.
pub fn make_combined(p: f64, fraction: f64, kind: PairKind, lattice: &Lattice) -> Result<NoiseModel> {
    check_probability("p", p)?;
    check_probability("p1 fraction", fraction)?;
    let p1 = fraction * p;
    let avg_degree = 2.0 * lattice.neighbor_pairs.len() as f64 / lattice.num_qubits() as f64;
    let p2 = (p - p1) / avg_degree;
    let mut model = make_iid(p1, Bias::depolarizing(), lattice.num_qubits())?;
    model.descriptor.p = p;
    model.with_pair_channel(PairChannel { kind, p2, pxx: 0.5 })
}

fn sample_letter<R: Rng + ?Sized>(rng: &mut R, r: &QubitRates) -> Pauli {
    let u: f64 = rng.gen();
    if u < r.x {
        Pauli::X
    } else if u < r.x + r.y {
        Pauli::Y
    } else if u < r.x + r.y + r.z {
        Pauli::Z
    } else {
        Pauli::I
    }
}

/// Draw an error from `model`: independent single-qubit Paulis followed by
/// independent pair errors on the lattice's nearest-neighbour edges.
pub fn sample_error_with<R: Rng + ?Sized>(model: &NoiseModel, lattice: &Lattice, rng: &mut R) -> PauliOperator {
    let n = lattice.num_qubits();
    debug_assert_eq!(model.per_qubit.len(), n);
    let mut op = PauliOperator::identity(n);
    for (q, r) in model.per_qubit.iter().enumerate() {
        let p = sample_letter(rng, r);
        if p != Pauli::I {
            op.apply(q, p);
        }
    }
    if let Some(pc) = model.pair_channel {
        for &(a, b) in &lattice.neighbor_pairs {
            if rng.gen::<f64>() >= pc.p2 {
                continue;
            }
            let (la, lb) = match pc.kind {
                PairKind::XxZz => {
                    if rng.gen::<f64>() < pc.pxx {
                        (Pauli::X, Pauli::X)
                    } else {
                        (Pauli::Z, Pauli::Z)
                    }
                }
                PairKind::Xz => {
                    if rng.gen::<bool>() {
                        (Pauli::X, Pauli::Z)
                    } else {
                        (Pauli::Z, Pauli::X)
                    }
                }
            };
            op.apply(a, la);
            op.apply(b, lb);
        }
    }
    op
}

/// Reproducible error for one trial seed.
pub fn sample_error(model: &NoiseModel, lattice: &Lattice, trial_seed: u64) -> PauliOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    sample_error_with(model, lattice, &mut rng)
}

/// Probability that the single-qubit channel on `q` flips the cells of `sub`
/// adjacent to it.
pub fn sublattice_flip_probability(model: &NoiseModel, q: usize, code: &CodeLayout, sub: Sublattice) -> f64 {
    let measured = code.sublattice_letter(q, sub);
    let r = &model.per_qubit[q];
    Pauli::NON_IDENTITY
        .iter()
        .filter(|p| p.anticommutes(measured))
        .map(|&p| r.rate(p))
        .sum()
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a tuple of words, used to key per-trial streams.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5eed_u64, |acc, &p| mix64(acc ^ mix64(p)))
}
