//! Figure recipes: the sweeps behind each figure and how they become curves.

use tailored_surface::experiments::{degeneracy_panels, ExperimentSpec, LatticeSize, NoiseSpec};
use tailored_surface::noise::PairKind;
use tailored_surface::{CodeFamily, Layout, MetricKind};

use crate::CliError;

pub const NAMES: [&str; 8] = ["fig5a", "fig5b", "fig7", "fig9", "fig10", "fig11", "fig12", "fig13"];

const THRESHOLD_TRIALS: u64 = 50_000;
const SUBTHRESHOLD_TRIALS: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plot {
    /// One point per distance at the sweep's single rate.
    VsDistance,
    /// One curve per distance, points over the rate grid.
    VsRate,
    /// One fitted threshold per sweep, plotted against a noise parameter.
    Threshold { param: &'static str },
}

#[derive(Clone, Debug)]
pub struct Curve {
    pub label: String,
    /// Sweep names with the x value they contribute for threshold plots.
    pub sweeps: Vec<(f64, String)>,
}

#[derive(Clone, Debug)]
pub struct Recipe {
    pub name: &'static str,
    pub title: String,
    pub plot: Plot,
    pub log_y: bool,
    specs: Vec<ExperimentSpec>,
    pub curves: Vec<Curve>,
}

fn sizes(ds: &[usize]) -> Vec<LatticeSize> {
    ds.iter().map(|&d| LatticeSize::Square(d)).collect()
}

fn grid(lo: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| ((lo + step * i as f64) * 1e6).round() / 1e6).collect()
}

fn spec(name: String, family: CodeFamily, noise: NoiseSpec, metric: MetricKind, p: Vec<f64>, ds: &[usize], trials: u64) -> ExperimentSpec {
    ExperimentSpec {
        name: Some(name),
        family,
        layout: Layout::NonRotated,
        distances: sizes(ds),
        noise,
        metric,
        p,
        trials,
        seed: 0,
    }
}

/// Matching metric used with each code when the decoder is not noise-aware.
fn plain_metric(family: CodeFamily) -> MetricKind {
    match family {
        CodeFamily::Mhhm => MetricKind::WeightedManhattan,
        _ => MetricKind::Manhattan,
    }
}

impl Recipe {
    pub fn by_name(name: &str) -> Result<Recipe, CliError> {
        let sub_ds = [5, 7, 9, 11];
        let near_ds = [7, 9, 11, 13];
        let mut specs = Vec::new();
        let mut curves = Vec::new();
        let single = |curves: &mut Vec<Curve>, specs: &mut Vec<ExperimentSpec>, label: String, s: ExperimentSpec| {
            curves.push(Curve { label, sweeps: vec![(0.0, s.name.clone().unwrap())] });
            specs.push(s);
        };
        let (title, plot, log_y) = match name {
            "fig5a" => {
                for sp in [0.125, 0.5] {
                    for family in [CodeFamily::Css, CodeFamily::Mmhh] {
                        let s = spec(
                            format!("fig5a-{}-sp{sp}", family.name()),
                            family,
                            NoiseSpec::gaussian(sp, 0.5),
                            MetricKind::Manhattan,
                            vec![0.1],
                            &sub_ds,
                            SUBTHRESHOLD_TRIALS,
                        );
                        single(&mut curves, &mut specs, format!("{} sigma_p={sp}", family.name()), s);
                    }
                }
                ("p_fail vs d, p=0.1, sigma_tot=0.5".to_string(), Plot::VsDistance, true)
            }
            "fig5b" => {
                for st in [0.25, 0.5] {
                    for metric in [MetricKind::WeightedManhattan, MetricKind::Dijkstra] {
                        let s = spec(
                            format!("fig5b-{}-st{st}", metric.name()),
                            CodeFamily::Mhhm,
                            NoiseSpec::gaussian(0.5, st),
                            metric,
                            vec![0.1],
                            &sub_ds,
                            SUBTHRESHOLD_TRIALS,
                        );
                        single(&mut curves, &mut specs, format!("mhhm {} sigma_tot={st}", metric.name()), s);
                    }
                }
                ("MHHM p_fail vs d, p=0.1, sigma_p=0.5".to_string(), Plot::VsDistance, true)
            }
            "fig7" => {
                for metric in [MetricKind::Manhattan, MetricKind::Degeneracy, MetricKind::DegeneracyCorrelation] {
                    let s = spec(
                        format!("fig7-{}", metric.name()),
                        CodeFamily::Xzzx,
                        NoiseSpec::combined(0.25, PairKind::Xz),
                        metric,
                        vec![0.125],
                        &sub_ds,
                        SUBTHRESHOLD_TRIALS,
                    );
                    single(&mut curves, &mut specs, metric.name().to_string(), s);
                }
                ("XZZX with XZ pairs, p=0.125, p1=0.25p".to_string(), Plot::VsDistance, true)
            }
            "fig9" | "fig11" => {
                let noise_aware = name == "fig11";
                for st in [0.5, 0.0] {
                    for family in [CodeFamily::Css, CodeFamily::Mmhh, CodeFamily::Mhhm] {
                        let metric = if noise_aware { MetricKind::Dijkstra } else { plain_metric(family) };
                        let s = spec(
                            format!("{name}-{}-st{st}", family.name()),
                            family,
                            NoiseSpec::gaussian(0.5, st),
                            metric,
                            grid(0.13, 0.008, 11),
                            &near_ds,
                            THRESHOLD_TRIALS,
                        );
                        single(&mut curves, &mut specs, format!("{} sigma_tot={st}", family.name()), s);
                    }
                }
                let m = if noise_aware { "shortest-path" } else { "Manhattan" };
                (format!("near-threshold p_fail, sigma_p=0.5, {m} weights"), Plot::VsRate, false)
            }
            "fig10" => {
                for family in [CodeFamily::Css, CodeFamily::Mmhh] {
                    let mut members = Vec::new();
                    for sp in [0.0, 0.125, 0.25, 0.375, 0.5] {
                        let s = spec(
                            format!("fig10-{}-sp{sp}", family.name()),
                            family,
                            NoiseSpec::gaussian(sp, 0.5),
                            MetricKind::Manhattan,
                            grid(0.13, 0.008, 11),
                            &near_ds,
                            THRESHOLD_TRIALS,
                        );
                        members.push((sp, s.name.clone().unwrap()));
                        specs.push(s);
                    }
                    curves.push(Curve { label: family.name().to_string(), sweeps: members });
                }
                ("threshold vs sigma_p, sigma_tot=0.5".to_string(), Plot::Threshold { param: "sigma_p" }, false)
            }
            "fig12" => {
                for metric in [MetricKind::Manhattan, MetricKind::Dijkstra] {
                    let mut members = Vec::new();
                    for st in [0.0, 0.125, 0.25, 0.375, 0.5] {
                        let s = spec(
                            format!("fig12-{}-st{st}", metric.name()),
                            CodeFamily::Mmhh,
                            NoiseSpec::gaussian(0.5, st),
                            metric,
                            grid(0.14, 0.008, 11),
                            &near_ds,
                            THRESHOLD_TRIALS,
                        );
                        members.push((st, s.name.clone().unwrap()));
                        specs.push(s);
                    }
                    curves.push(Curve { label: metric.name().to_string(), sweeps: members });
                }
                ("MMHH threshold vs sigma_tot, sigma_p=0.5".to_string(), Plot::Threshold { param: "sigma_tot" }, false)
            }
            "fig13" => {
                for panel in degeneracy_panels() {
                    for metric in [MetricKind::Manhattan, MetricKind::DegeneracyLiteral] {
                        let mut s = panel.sweep(&sub_ds, metric, SUBTHRESHOLD_TRIALS, 0);
                        s.name = Some(format!("fig13-{}-{}", panel.label(), metric.name()));
                        single(&mut curves, &mut specs, format!("{} p={} {}", panel.label(), panel.p, metric.name()), s);
                    }
                }
                ("XZZX with and without the degeneracy term".to_string(), Plot::VsDistance, true)
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown figure recipe {other:?}; expected one of {}",
                    NAMES.join(", ")
                )))
            }
        };
        let name = NAMES.iter().copied().find(|n| *n == name).expect("matched above");
        Ok(Recipe { name, title, plot, log_y, specs, curves })
    }

    /// The recipe's sweeps with their pinned defaults.
    pub fn sweeps(&self) -> Vec<ExperimentSpec> {
        self.specs.clone()
    }
}
