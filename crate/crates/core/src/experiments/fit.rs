//! Finite-size scaling fit of the threshold and sub-threshold slope fits.

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::PointResult;
use crate::error::{Error, Result};

/// Floor on per-point uncertainty so zero-failure points keep finite weight.
pub const SIGMA_FLOOR: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub d: usize,
    pub p: f64,
    pub p_fail: f64,
    pub stderr: f64,
}

impl From<&PointResult> for FitPoint {
    fn from(r: &PointResult) -> Self {
        FitPoint { d: r.distance(), p: r.p, p_fail: r.p_fail, stderr: r.stderr }
    }
}

/// Result of fitting `P = B0 + B1 x + B2 x^2` with `x = (p - p_th) d^(1/nu)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFit {
    pub p_th: f64,
    pub p_th_stderr: f64,
    pub nu: f64,
    pub nu_stderr: f64,
    pub b: [f64; 3],
    /// Covariance of `(p_th, nu, B0, B1, B2)`.
    pub covariance: [[f64; 5]; 5],
    pub chi2: f64,
    pub dof: usize,
    pub window: (f64, f64),
    pub distances: Vec<usize>,
}

fn sigma(pt: &FitPoint) -> f64 {
    pt.stderr.max(SIGMA_FLOOR)
}

fn scaled(pt: &FitPoint, p_th: f64, nu: f64) -> f64 {
    (pt.p - p_th) * (pt.d as f64).powf(1.0 / nu)
}

fn model(b: &[f64], x: f64) -> f64 {
    b[0] + b[1] * x + b[2] * x * x
}

/// Weighted least squares for the polynomial at fixed `(p_th, nu)`.
fn inner(points: &[FitPoint], p_th: f64, nu: f64) -> Option<([f64; 3], f64)> {
    let n = points.len();
    let a = DMatrix::from_fn(n, 3, |i, j| scaled(&points[i], p_th, nu).powi(j as i32) / sigma(&points[i]));
    let y = DVector::from_fn(n, |i, _| points[i].p_fail / sigma(&points[i]));
    let sol = a.clone().svd(true, true).solve(&y, 1e-12).ok()?;
    let chi2 = (a * &sol - y).norm_squared();
    chi2.is_finite().then(|| ([sol[0], sol[1], sol[2]], chi2))
}

struct Profile<'a> {
    points: &'a [FitPoint],
}

impl CostFunction for Profile<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, v: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        if v[1] <= 0.05 {
            return Ok(f64::MAX);
        }
        Ok(inner(self.points, v[0], v[1]).map_or(f64::MAX, |(_, c)| c))
    }
}

fn residuals(points: &[FitPoint], theta: &[f64; 5]) -> DVector<f64> {
    DVector::from_fn(points.len(), |i, _| {
        let pt = &points[i];
        (pt.p_fail - model(&theta[2..], scaled(pt, theta[0], theta[1]))) / sigma(pt)
    })
}

/// Fit the threshold crossing with `p_th` searched inside `window`. Points
/// outside the window are ignored.
///
/// Fails when the optimum sits on the window edge, when the curves do not
/// cross (slope `B1` not resolved above zero), or when `p_th` is not
/// constrained better than half the window.
pub fn fit_threshold(points: &[FitPoint], window: (f64, f64)) -> Result<ThresholdFit> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::FitFailed(format!("empty window [{lo}, {hi}]")));
    }
    let points: Vec<FitPoint> = points.iter().copied().filter(|p| p.p >= lo && p.p <= hi).collect();
    let points = points.as_slice();
    let mut sizes: Vec<usize> = points.iter().map(|p| p.d).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::FitFailed(format!("need at least 3 code sizes inside the window, found {}", sizes.len())));
    }
    let mut rates: Vec<u64> = points.iter().map(|p| p.p.to_bits()).collect();
    rates.sort_unstable();
    rates.dedup();
    if rates.len() < 4 {
        return Err(Error::FitFailed(format!("need at least 4 rates inside the window, found {}", rates.len())));
    }

    let mut best = (f64::MAX, lo, 1.0);
    for i in 0..=60 {
        let pt = lo + (hi - lo) * i as f64 / 60.0;
        for j in 0..38 {
            let nu = 0.3 + 0.1 * j as f64;
            if let Some((_, c)) = inner(points, pt, nu) {
                if c < best.0 {
                    best = (c, pt, nu);
                }
            }
        }
    }
    let (_, pt0, nu0) = best;
    let simplex = vec![vec![pt0, nu0], vec![pt0 + (hi - lo) / 60.0, nu0], vec![pt0, nu0 + 0.1]];
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-12)
        .map_err(|e| Error::FitFailed(e.to_string()))?;
    let res = Executor::new(Profile { points }, solver)
        .configure(|s| s.max_iters(2000))
        .run()
        .map_err(|e| Error::FitFailed(e.to_string()))?;
    let v = res.state().best_param.clone().unwrap_or_else(|| vec![pt0, nu0]);
    let (p_th, nu) = (v[0], v[1]);
    let (b, chi2) = inner(points, p_th, nu).ok_or_else(|| Error::FitFailed("degenerate design".into()))?;

    let margin = 0.02 * (hi - lo);
    if p_th < lo + margin || p_th > hi - margin {
        return Err(Error::FitFailed(format!("p_th = {p_th:.5} is at the edge of [{lo}, {hi}]")));
    }

    // Covariance from the Jacobian of the weighted residuals.
    let theta = [p_th, nu, b[0], b[1], b[2]];
    let mut jac = DMatrix::zeros(points.len(), 5);
    for k in 0..5 {
        let h = 1e-6 * theta[k].abs().max(1e-3);
        let mut tp = theta;
        let mut tm = theta;
        tp[k] += h;
        tm[k] -= h;
        let col = (residuals(points, &tp) - residuals(points, &tm)) / (2.0 * h);
        jac.set_column(k, &col);
    }
    let cov = (jac.transpose() * &jac)
        .try_inverse()
        .ok_or_else(|| Error::FitFailed("singular covariance".into()))?;
    let se: Vec<f64> = (0..5).map(|k| cov[(k, k)].max(0.0).sqrt()).collect();
    if !se.iter().all(|s| s.is_finite()) {
        return Err(Error::FitFailed("singular covariance".into()));
    }
    if !(b[1] > 2.0 * se[3]) {
        return Err(Error::FitFailed(format!("no crossing: B1 = {:.4} ± {:.4}", b[1], se[3])));
    }
    if se[0] > (hi - lo) / 2.0 {
        return Err(Error::FitFailed(format!("p_th unconstrained: stderr {:.4}", se[0])));
    }
    Ok(ThresholdFit {
        p_th,
        p_th_stderr: se[0],
        nu,
        nu_stderr: se[1],
        b,
        covariance: std::array::from_fn(|i| std::array::from_fn(|j| cov[(i, j)])),
        chi2,
        dof: points.len() - 5,
        window,
        distances: sizes,
    })
}

/// Fit of `ln p_fail = intercept + slope·d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub used: usize,
    pub dropped: usize,
}

/// Weighted line through `ln p_fail` against distance. Points without
/// failures carry no log information and are dropped.
pub fn subthreshold_scan(points: &[FitPoint]) -> Result<SlopeFit> {
    let (used, dropped): (Vec<&FitPoint>, Vec<&FitPoint>) = points.iter().partition(|p| p.p_fail > 0.0);
    for p in &dropped {
        log::warn!("d={} p={} has no failures; dropped from slope fit", p.d, p.p);
    }
    let mut ds: Vec<usize> = used.iter().map(|p| p.d).collect();
    ds.sort_unstable();
    ds.dedup();
    if ds.len() < 2 {
        return Err(Error::FitFailed("slope fit needs two sizes with failures".into()));
    }
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in &used {
        let s = (p.stderr / p.p_fail).max(1e-6);
        let w = 1.0 / (s * s);
        let (x, y) = (p.d as f64, p.p_fail.ln());
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = sw * sxx - sx * sx;
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / sw;
    Ok(SlopeFit {
        slope,
        slope_stderr: (sw / det).sqrt(),
        intercept,
        used: used.len(),
        dropped: dropped.len(),
    })
}
