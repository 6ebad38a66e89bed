//! Browser bindings: draw a code, decode one sampled error, run a small sweep.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use tailored_surface::experiments::{run_sweep, ExperimentSpec, LatticeSize, NoiseSpec};
use tailored_surface::noise::{derive_seed, sample_error};
use tailored_surface::pauli::{classify, extract_syndrome};
use tailored_surface::{
    build_family, build_lattice, CodeFamily, CodeLayout, Decoder, LatticeSpec, Layout, MetricKind, NoiseModel, Pauli,
    PauliOperator, Sublattice,
};
use wasm_bindgen::prelude::*;

/// Parameters shared by every demo operation.
#[derive(Clone, Debug)]
pub struct Setup {
    pub family: CodeFamily,
    pub layout: Layout,
    pub d: usize,
    pub p: f64,
    pub sigma_p: f64,
    pub sigma_tot: f64,
    pub seed: u64,
}

impl Setup {
    pub fn parse(family: &str, layout: &str, d: usize, p: f64, sigma_p: f64, sigma_tot: f64, seed: u32) -> Result<Self, String> {
        let family: CodeFamily = family.parse().map_err(|e| format!("{e}"))?;
        let layout = match layout {
            "non_rotated" => Layout::NonRotated,
            "rotated" => Layout::Rotated,
            other => return Err(format!("unknown layout {other:?}")),
        };
        if !(2..=25).contains(&d) {
            return Err(format!("d = {d} must lie in 2..=25 for the demo"));
        }
        Ok(Setup { family, layout, d, p, sigma_p, sigma_tot, seed: seed as u64 })
    }

    fn noise_spec(&self) -> NoiseSpec {
        if self.sigma_p == 0.0 && self.sigma_tot == 0.0 {
            NoiseSpec::depolarizing()
        } else {
            NoiseSpec::gaussian(self.sigma_p, self.sigma_tot)
        }
    }

    fn build(&self) -> Result<(CodeLayout, NoiseModel), String> {
        let lattice = Arc::new(build_lattice(LatticeSpec::square(self.d, self.layout)).map_err(|e| e.to_string())?);
        let spec = self.noise_spec();
        spec.validate().map_err(|e| e.to_string())?;
        let noise = spec.realize(self.p, &lattice, derive_seed(&[self.seed, 0])).map_err(|e| e.to_string())?;
        let code = build_family(self.family, lattice, Some(&noise)).map_err(|e| e.to_string())?;
        Ok((code, noise))
    }
}

const UNIT: f64 = 24.0;
const MARGIN: f64 = 30.0;

fn letter_color(p: Pauli) -> &'static str {
    match p {
        Pauli::I => "#ffffff",
        Pauli::X => "#d62728",
        Pauli::Y => "#2ca02c",
        Pauli::Z => "#1f77b4",
    }
}

/// SVG of the code: stabilizer tiles with the letter each measures on each
/// qubit, optional error and correction, and lit-up defects.
pub fn draw(code: &CodeLayout, error: Option<&PauliOperator>, correction: Option<&PauliOperator>, defects: &[bool]) -> String {
    let lattice = code.lattice();
    let (mut max_x, mut max_z) = (0i64, 0i64);
    for q in &lattice.qubits {
        max_x = max_x.max(q.coord.0);
        max_z = max_z.max(q.coord.1);
    }
    let pos = |c: (i64, i64)| (MARGIN + c.0 as f64 * UNIT, MARGIN + c.1 as f64 * UNIT);
    let (w, h) = (2.0 * MARGIN + max_x as f64 * UNIT, 2.0 * MARGIN + max_z as f64 * UNIT);
    let mut s = format!(r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" font-family="monospace" font-size="9">"#);
    for st in &lattice.stabilizers {
        let (cx, cy) = pos(st.center);
        let mut corners: Vec<(f64, f64)> = st.support.iter().map(|&q| pos(lattice.qubits[q].coord)).collect();
        if corners.len() < 4 {
            corners.push((cx, cy));
        }
        let (mx, my) = (
            corners.iter().map(|c| c.0).sum::<f64>() / corners.len() as f64,
            corners.iter().map(|c| c.1).sum::<f64>() / corners.len() as f64,
        );
        corners.sort_by(|a, b| (a.1 - my).atan2(a.0 - mx).total_cmp(&(b.1 - my).atan2(b.0 - mx)));
        let pts: Vec<String> = corners.iter().map(|c| format!("{:.1},{:.1}", c.0, c.1)).collect();
        let fill = if defects.get(st.id).copied().unwrap_or(false) {
            "#ffb000"
        } else if st.sublattice == Sublattice::Primal {
            "#e8e8e8"
        } else {
            "#e6dcf2"
        };
        let _ = write!(s, r##"<polygon points="{}" fill="{fill}" stroke="#999"/>"##, pts.join(" "));
        for &q in &st.support {
            let (qx, qy) = pos(lattice.qubits[q].coord);
            let letter = code.letter(st.id, q).unwrap_or(Pauli::I);
            let (lx, ly) = (qx + 0.35 * (cx - qx), qy + 0.35 * (cy - qy));
            let _ = write!(
                s,
                r#"<text x="{lx:.1}" y="{:.1}" text-anchor="middle" fill="{}">{}</text>"#,
                ly + 3.0,
                letter_color(letter),
                letter.to_char()
            );
        }
    }
    for q in &lattice.qubits {
        let (x, y) = pos(q.coord);
        let e = error.map_or(Pauli::I, |e| e.get(q.id));
        let _ = write!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="5" fill="{}" stroke="black"/>"#, letter_color(e));
        if let Some(c) = correction {
            let l = c.get(q.id);
            if l != Pauli::I {
                let _ = write!(
                    s,
                    r#"<circle cx="{x:.1}" cy="{y:.1}" r="8" fill="none" stroke="{}" stroke-width="2" stroke-dasharray="3,2"/>"#,
                    letter_color(l)
                );
            }
        }
    }
    s.push_str("</svg>");
    s
}

pub fn layout_view(setup: &Setup) -> Result<String, String> {
    let (code, _) = setup.build()?;
    Ok(draw(&code, None, None, &[]))
}

#[derive(Serialize)]
pub struct DecodeReport {
    pub svg: String,
    pub error: String,
    pub correction: String,
    pub defects: Vec<usize>,
    pub matched_pairs: Vec<(usize, Option<usize>)>,
    pub outcome: String,
}

pub fn decode_one(setup: &Setup, metric: &str) -> Result<DecodeReport, String> {
    let metric: MetricKind = metric.parse().map_err(|e| format!("{e}"))?;
    let (code, noise) = setup.build()?;
    let resolved = metric.resolve(&code, &noise).map_err(|e| e.to_string())?;
    let decoder = Decoder::new(&code, resolved, Some(&noise)).map_err(|e| e.to_string())?;
    let error = sample_error(&noise, code.lattice(), derive_seed(&[setup.seed, 1]));
    let syndrome = extract_syndrome(&error, &code).map_err(|e| e.to_string())?;
    let correction = decoder.decode(&syndrome).map_err(|e| e.to_string())?;
    let residual = error.compose(&correction.op).map_err(|e| e.to_string())?;
    let class = classify(&residual, code.logicals()).map_err(|e| e.to_string())?;
    let word = |op: &PauliOperator| (0..op.num_qubits()).map(|q| op.get(q).to_char()).collect::<String>();
    Ok(DecodeReport {
        svg: draw(&code, Some(&error), Some(&correction.op), syndrome.bits()),
        error: word(&error),
        correction: word(&correction.op),
        defects: syndrome.defects().collect(),
        matched_pairs: correction.matched_pairs.clone(),
        outcome: format!("{class:?}"),
    })
}

pub fn small_sweep(setup: &Setup, metric: &str, distances: &[usize], p: &[f64], trials: u64) -> Result<String, String> {
    let metric: MetricKind = metric.parse().map_err(|e| format!("{e}"))?;
    if trials > 100_000 {
        return Err("the demo caps sweeps at 100000 trials per point".into());
    }
    let noise = setup.noise_spec();
    let spec = ExperimentSpec {
        name: Some("demo".into()),
        family: setup.family,
        layout: setup.layout,
        distances: distances.iter().map(|&d| LatticeSize::Square(d)).collect(),
        noise,
        metric,
        p: p.to_vec(),
        trials,
        seed: setup.seed,
    };
    let result = run_sweep(&spec).map_err(|e| e.to_string())?;
    serde_json::to_string(&result.points).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = layoutSvg)]
pub fn layout_svg(family: &str, layout: &str, d: usize, p: f64, sigma_p: f64, sigma_tot: f64, seed: u32) -> Result<String, JsError> {
    let setup = Setup::parse(family, layout, d, p, sigma_p, sigma_tot, seed).map_err(|e| JsError::new(&e))?;
    layout_view(&setup).map_err(|e| JsError::new(&e))
}

/// JSON `DecodeReport` for one sampled error.
#[wasm_bindgen(js_name = sampleAndDecode)]
#[allow(clippy::too_many_arguments)]
pub fn sample_and_decode(
    family: &str,
    layout: &str,
    metric: &str,
    d: usize,
    p: f64,
    sigma_p: f64,
    sigma_tot: f64,
    seed: u32,
) -> Result<String, JsError> {
    let setup = Setup::parse(family, layout, d, p, sigma_p, sigma_tot, seed).map_err(|e| JsError::new(&e))?;
    let report = decode_one(&setup, metric).map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&report).map_err(|e| JsError::new(&e.to_string()))
}

/// JSON list of sweep points.
#[wasm_bindgen(js_name = runSweep)]
#[allow(clippy::too_many_arguments)]
pub fn run_small_sweep(
    family: &str,
    layout: &str,
    metric: &str,
    distances: Vec<usize>,
    p: Vec<f64>,
    sigma_p: f64,
    sigma_tot: f64,
    trials: u32,
    seed: u32,
) -> Result<String, JsError> {
    let d0 = distances.first().copied().unwrap_or(3);
    let p0 = p.first().copied().unwrap_or(0.1);
    let setup = Setup::parse(family, layout, d0, p0, sigma_p, sigma_tot, seed).map_err(|e| JsError::new(&e))?;
    small_sweep(&setup, metric, &distances, &p, trials as u64).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_draws_every_qubit_and_tile() {
        for layout in ["non_rotated", "rotated"] {
            let s = Setup::parse("mmhh", layout, 3, 0.1, 0.5, 0.5, 4).unwrap();
            let svg = layout_view(&s).unwrap();
            let (code, _) = s.build().unwrap();
            assert_eq!(svg.matches("<circle").count(), code.num_qubits());
            assert_eq!(svg.matches("<polygon").count(), code.num_stabilizers());
        }
    }

    #[test]
    fn decode_report_is_consistent() {
        let s = Setup::parse("xzzx", "non_rotated", 5, 0.08, 0.0, 0.0, 9).unwrap();
        let r = decode_one(&s, "manhattan").unwrap();
        assert_eq!(r.error.len(), 41);
        assert!(["None", "XbarFlip", "ZbarFlip", "YbarFlip"].contains(&r.outcome.as_str()));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"defects\""));
    }

    #[test]
    fn sweep_returns_one_point_per_coordinate() {
        let s = Setup::parse("css", "non_rotated", 3, 0.1, 0.0, 0.0, 1).unwrap();
        let out = small_sweep(&s, "manhattan", &[3, 5], &[0.05, 0.1], 50).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 4);
    }

    #[test]
    fn bad_input_is_reported() {
        assert!(Setup::parse("abc", "rotated", 3, 0.1, 0.0, 0.0, 1).is_err());
        assert!(Setup::parse("css", "hex", 3, 0.1, 0.0, 0.0, 1).is_err());
        let s = Setup::parse("css", "rotated", 3, 0.1, 0.0, 0.0, 1).unwrap();
        assert!(decode_one(&s, "nope").is_err());
    }
}
