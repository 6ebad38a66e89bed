//! Plot data and SVG rendering from persisted sweep results.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use tailored_surface::experiments::{binomial_stderr, fit_threshold, read_csv, ExperimentSpec, FitPoint, PointResult};
use tailored_surface::Layout;

use crate::recipes::{Plot, Recipe};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveData {
    pub label: String,
    /// Index of the recipe curve this data comes from.
    pub source: usize,
    /// `(x, y, y_err)`
    pub points: Vec<(f64, f64, f64)>,
}

fn layout_name(l: Layout) -> &'static str {
    match l {
        Layout::NonRotated => "non_rotated",
        Layout::Rotated => "rotated",
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn row_matches(row: &PointResult, spec: &ExperimentSpec, d: (usize, usize), p: f64) -> bool {
    row.family == spec.family.name()
        && row.metric == spec.metric.name()
        && row.layout == layout_name(spec.layout)
        && row.pair_kind == spec.noise.pair_kind.map_or("none", |k| k.name())
        && close(row.sigma_p, spec.noise.sigma_p)
        && close(row.sigma_tot, spec.noise.sigma_tot)
        && (row.d1, row.d2) == d
        && close(row.p, p)
}

/// Every row in every CSV under `dir`, in file-name order.
pub fn load_rows(dir: &Path) -> Result<Vec<PointResult>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    let mut rows = Vec::new();
    for f in files {
        rows.extend(read_csv(&f).map_err(|e| CliError::Runtime(e.to_string()))?);
    }
    Ok(rows)
}

/// Pool the rows at one coordinate. Rows sharing a seed are the same data
/// and counted once.
fn pooled(rows: &[PointResult], spec: &ExperimentSpec, d: (usize, usize), p: f64) -> Option<(u64, u64)> {
    let mut by_seed: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for r in rows.iter().filter(|r| row_matches(r, spec, d, p)) {
        by_seed.entry(r.seed).or_insert((r.failures, r.trials));
    }
    if by_seed.is_empty() {
        return None;
    }
    Some(by_seed.values().fold((0, 0), |(f, t), &(a, b)| (f + a, t + b)))
}

fn grid_points(rows: &[PointResult], spec: &ExperimentSpec, missing: &mut Vec<String>) -> Vec<(usize, f64, u64, u64)> {
    let mut out = Vec::new();
    for size in &spec.distances {
        let d = size.dims();
        for &p in &spec.p {
            match pooled(rows, spec, d, p) {
                Some((f, t)) => out.push((d.0.min(d.1), p, f, t)),
                None => missing.push(format!(
                    "{} (family={} metric={} sigma_p={} sigma_tot={} d=({},{}) p={p})",
                    spec.name.as_deref().unwrap_or("?"),
                    spec.family.name(),
                    spec.metric.name(),
                    spec.noise.sigma_p,
                    spec.noise.sigma_tot,
                    d.0,
                    d.1
                )),
            }
        }
    }
    out
}

/// Assemble the curves of `recipe` from `rows`, given the resolved sweeps.
pub fn build(recipe: &Recipe, specs: &[ExperimentSpec], rows: &[PointResult]) -> Result<Vec<CurveData>, CliError> {
    let find = |name: &str| specs.iter().find(|s| s.name.as_deref() == Some(name)).expect("recipe sweep");
    let mut missing = Vec::new();
    let mut curves = Vec::new();
    let mut fit_errors = Vec::new();
    for (source, curve) in recipe.curves.iter().enumerate() {
        match recipe.plot {
            Plot::VsDistance => {
                let spec = find(&curve.sweeps[0].1);
                let pts = grid_points(rows, spec, &mut missing)
                    .into_iter()
                    .map(|(d, _, f, t)| (d as f64, f as f64 / t as f64, binomial_stderr(f, t)))
                    .collect();
                curves.push(CurveData { label: curve.label.clone(), source, points: pts });
            }
            Plot::VsRate => {
                let spec = find(&curve.sweeps[0].1);
                let pts = grid_points(rows, spec, &mut missing);
                let mut ds: Vec<usize> = pts.iter().map(|p| p.0).collect();
                ds.dedup();
                for d in ds {
                    let points = pts
                        .iter()
                        .filter(|p| p.0 == d)
                        .map(|&(_, p, f, t)| (p, f as f64 / t as f64, binomial_stderr(f, t)))
                        .collect();
                    curves.push(CurveData { label: format!("{} d={d}", curve.label), source, points });
                }
            }
            Plot::Threshold { .. } => {
                let mut points = Vec::new();
                for (x, name) in &curve.sweeps {
                    let spec = find(name);
                    let before = missing.len();
                    let pts = grid_points(rows, spec, &mut missing);
                    if missing.len() > before {
                        continue;
                    }
                    let fit_pts: Vec<FitPoint> = pts
                        .iter()
                        .map(|&(d, p, f, t)| FitPoint { d, p, p_fail: f as f64 / t as f64, stderr: binomial_stderr(f, t) })
                        .collect();
                    let lo = spec.p.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = spec.p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    match fit_threshold(&fit_pts, (lo, hi)) {
                        Ok(fit) => points.push((*x, fit.p_th, fit.p_th_stderr)),
                        Err(e) => fit_errors.push(format!("{name}: {e}")),
                    }
                }
                curves.push(CurveData { label: curve.label.clone(), source, points });
            }
        }
    }
    if !missing.is_empty() {
        return Err(CliError::Runtime(format!(
            "{}: {} missing sweep coordinates:\n  {}",
            recipe.name,
            missing.len(),
            missing.join("\n  ")
        )));
    }
    for e in fit_errors {
        log::warn!("{e}");
    }
    Ok(curves)
}

/// Tab-separated curve data with the generating sweep echoed in comments.
pub fn curve_file(recipe: &Recipe, curve: &CurveData, specs: &[ExperimentSpec]) -> String {
    let mut s = format!("# recipe {}: {}\n# curve {}\n", recipe.name, recipe.title, curve.label);
    for (_, name) in &recipe.curves[curve.source].sweeps {
        if let Some(spec) = specs.iter().find(|s| s.name.as_deref() == Some(name)) {
            let _ = writeln!(s, "# sweep {}", serde_json::to_string(spec).unwrap_or_default());
        }
    }
    let x = match recipe.plot {
        Plot::VsDistance => "d",
        Plot::VsRate => "p",
        Plot::Threshold { param } => param,
    };
    let y = if matches!(recipe.plot, Plot::Threshold { .. }) { "p_th" } else { "p_fail" };
    let _ = writeln!(s, "{x}\t{y}\tstderr");
    for (a, b, c) in &curve.points {
        let _ = writeln!(s, "{a}\t{b}\t{c}");
    }
    s
}

const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

/// Axes, points, error bars and one polyline per curve.
pub fn render_svg(recipe: &Recipe, curves: &[CurveData]) -> String {
    let (w, h) = (720.0, 480.0);
    let (left, right, top, bottom) = (70.0, 200.0, 40.0, 50.0);
    let ty = |v: f64| if recipe.log_y { v.max(1e-300).log10() } else { v };
    let pts: Vec<(f64, f64, f64)> = curves
        .iter()
        .flat_map(|c| c.points.iter().copied())
        .filter(|p| !recipe.log_y || p.1 > 0.0)
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y, e) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        let lo = if recipe.log_y { y } else { y - e };
        y0 = y0.min(ty(lo));
        y1 = y1.max(ty(y + e));
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (ty(y) - y0) / (y1 - y0) * (h - top - bottom);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, "<desc>{} {}</desc>", recipe.name, escape(&recipe.title));
    let _ = writeln!(s, r#"<text x="{}" y="20" font-size="14">{}</text>"#, left, escape(&recipe.title));
    let _ = writeln!(
        s,
        r#"<path d="M{left} {top} V{} H{}" fill="none" stroke="black"/>"#,
        h - bottom,
        w - right
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let label_y = if recipe.log_y { format!("{:.1e}", 10f64.powf(fy)) } else { format!("{fy:.3}") };
        let yy = h - bottom - (fy - y0) / (y1 - y0) * (h - top - bottom);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{fx:.3}</text>"#, px(fx), h - bottom + 16.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{label_y}</text>"#, left - 6.0, yy + 4.0);
    }
    for (k, c) in curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let visible: Vec<_> = c.points.iter().filter(|p| !recipe.log_y || p.1 > 0.0).collect();
        let path: Vec<String> = visible.iter().map(|p| format!("{:.1},{:.1}", px(p.0), py(p.1))).collect();
        if path.len() > 1 {
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}"/>"#, path.join(" "));
        }
        for p in &visible {
            let lo = if recipe.log_y { (p.1 - p.2).max(p.1 * 1e-3) } else { p.1 - p.2 };
            let _ = writeln!(
                s,
                r#"<line x1="{x:.1}" x2="{x:.1}" y1="{:.1}" y2="{:.1}" stroke="{color}"/><circle cx="{x:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                py(lo),
                py(p.1 + p.2),
                py(p.1),
                x = px(p.0)
            );
        }
        let ly = top + 14.0 * k as f64;
        let _ = writeln!(s, r#"<text x="{}" y="{ly:.1}" fill="{color}">{}</text>"#, w - right + 10.0, escape(&c.label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
