mod config;
mod figure;
mod recipes;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use tailored_surface::experiments::{fit_threshold, read_csv, run_sweep, write_csv, write_manifest, FitPoint, PointResult, ThresholdFit};

use config::RunConfig;
use recipes::Recipe;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

fn runtime<E: fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Parser)]
#[command(name = "tsurf", version, about = "Clifford-deformed surface code simulations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every sweep in a config file and write CSV results with JSON manifests.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: the config's `out`, else ./results).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        /// Replace the master seed of every sweep.
        #[arg(long)]
        seed: Option<u64>,
        /// Replace the trial count of every sweep.
        #[arg(long)]
        trials_override: Option<u64>,
    },
    /// Fit thresholds to result CSVs, one fit per (family, metric, noise) group.
    Threshold {
        /// CSV files or glob patterns.
        #[arg(long, required = true, num_args = 1..)]
        results: Vec<String>,
        /// Fit window as `lo,hi`.
        #[arg(long, value_parser = parse_window)]
        window: (f64, f64),
        #[arg(long, default_value = "threshold.json")]
        out: PathBuf,
    },
    /// Turn persisted results into per-curve data files and an SVG.
    Figure {
        /// One of fig5a, fig5b, fig7, fig9, fig10, fig11, fig12, fig13.
        recipe: String,
        /// Directory holding the result CSVs.
        #[arg(long)]
        results: PathBuf,
        /// Config used for the run, if it overrode the recipe defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (default: <results>/<recipe>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config file without running anything.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if !(lo < hi) {
        return Err(format!("window lower bound {lo} must be below {hi}"));
    }
    Ok((lo, hi))
}

/// Write through a temporary file so readers never see a partial file.
fn replace_file(path: &Path, write: impl FnOnce(&Path) -> Result<(), CliError>) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    write(&tmp)?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn simulate(
    config: &Path,
    out: Option<PathBuf>,
    workers: Option<usize>,
    seed: Option<u64>,
    trials: Option<u64>,
) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    if trials == Some(0) {
        return Err(CliError::Config("--trials-override must be at least 1".into()));
    }
    let specs = cfg.resolved_specs(seed, trials)?;
    if let Some(n) = workers.or(cfg.workers) {
        if n == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(runtime)?;
    }
    let out = out.or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("results"));
    std::fs::create_dir_all(&out).map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;

    println!("{:<28} {:>4} {:>4} {:>8} {:>16} {:>10} {:>10}", "sweep", "d1", "d2", "p", "failures/trials", "p_fail", "stderr");
    for spec in &specs {
        let name = spec.name.clone().expect("resolved specs are named");
        let result = run_sweep(spec).map_err(|e| CliError::Runtime(format!("{name}: {e}")))?;
        // Each sweep is flushed as soon as it finishes so an interrupted run
        // keeps everything completed so far.
        let csv_name = format!("{name}.csv");
        replace_file(&out.join(&csv_name), |p| write_csv(p, &result.points).map_err(runtime))?;
        replace_file(&out.join(format!("{name}.json")), |p| write_manifest(p, &result, &csv_name).map_err(runtime))?;
        for r in &result.points {
            println!(
                "{:<28} {:>4} {:>4} {:>8.4} {:>16} {:>10.6} {:>10.6}",
                name,
                r.d1,
                r.d2,
                r.p,
                format!("{}/{}", r.failures, r.trials),
                r.p_fail,
                r.stderr
            );
        }
    }
    println!("wrote {} sweeps to {}", specs.len(), out.display());
    Ok(())
}

#[derive(Serialize)]
struct GroupFit {
    group: String,
    window: (f64, f64),
    distances: Vec<usize>,
    fit: Option<ThresholdFit>,
    error: Option<String>,
}

fn group_key(r: &PointResult) -> String {
    format!(
        "family={} metric={} layout={} sigma_p={} sigma_tot={} pair_kind={}",
        r.family, r.metric, r.layout, r.sigma_p, r.sigma_tot, r.pair_kind
    )
}

fn threshold(patterns: &[String], window: (f64, f64), out: &Path) -> Result<(), CliError> {
    let mut files = Vec::new();
    for pat in patterns {
        let matches: Vec<PathBuf> = glob::glob(pat)
            .map_err(|e| CliError::Config(format!("{pat}: {e}")))?
            .filter_map(|p| p.ok())
            .collect();
        if matches.is_empty() {
            return Err(CliError::Runtime(format!("no result files match {pat}")));
        }
        files.extend(matches);
    }
    files.sort();
    files.dedup();
    let mut groups: BTreeMap<String, Vec<PointResult>> = BTreeMap::new();
    for f in &files {
        for r in read_csv(f).map_err(runtime)? {
            groups.entry(group_key(&r)).or_default().push(r);
        }
    }
    let mut fits = Vec::new();
    for (group, rows) in &groups {
        let pts: Vec<FitPoint> = rows.iter().map(FitPoint::from).collect();
        let mut distances: Vec<usize> = pts.iter().filter(|p| p.p >= window.0 && p.p <= window.1).map(|p| p.d).collect();
        distances.sort_unstable();
        distances.dedup();
        match fit_threshold(&pts, window) {
            Ok(fit) => {
                println!("{group}");
                println!(
                    "  p_th = {:.5} ± {:.5}   nu = {:.3} ± {:.3}   chi2/dof = {:.2}/{}",
                    fit.p_th, fit.p_th_stderr, fit.nu, fit.nu_stderr, fit.chi2, fit.dof
                );
                fits.push(GroupFit { group: group.clone(), window, distances, fit: Some(fit), error: None });
            }
            Err(e) => {
                println!("{group}\n  insufficient data: {e}");
                fits.push(GroupFit { group: group.clone(), window, distances, fit: None, error: Some(e.to_string()) });
            }
        }
    }
    let json = serde_json::to_string_pretty(&fits).map_err(runtime)?;
    replace_file(out, |p| std::fs::write(p, json).map_err(runtime))?;
    if fits.iter().all(|f| f.fit.is_none()) {
        return Err(CliError::Runtime("no group produced a threshold fit".into()));
    }
    Ok(())
}

fn sanitize(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

fn make_figure(name: &str, results: &Path, config: Option<&Path>, out: Option<PathBuf>) -> Result<(), CliError> {
    let recipe = Recipe::by_name(name)?;
    let specs = match config {
        Some(path) => {
            let cfg = RunConfig::load(path)?;
            RunConfig { figure: Some(name.to_string()), experiments: Vec::new(), ..cfg }.resolved_specs(None, None)?
        }
        None => recipe.sweeps(),
    };
    let rows = figure::load_rows(results)?;
    let curves = figure::build(&recipe, &specs, &rows)?;
    let out = out.unwrap_or_else(|| results.join(name));
    std::fs::create_dir_all(&out).map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;
    for c in &curves {
        let text = figure::curve_file(&recipe, c, &specs);
        replace_file(&out.join(format!("{}.tsv", sanitize(&c.label))), |p| std::fs::write(p, text).map_err(runtime))?;
    }
    let svg = figure::render_svg(&recipe, &curves);
    replace_file(&out.join(format!("{name}.svg")), |p| std::fs::write(p, svg).map_err(runtime))?;
    let json = serde_json::to_string_pretty(&serde_json::json!({ "recipe": name, "sweeps": specs, "curves": curves }))
        .map_err(runtime)?;
    replace_file(&out.join(format!("{name}.json")), |p| std::fs::write(p, json).map_err(runtime))?;
    println!("wrote {} curves to {}", curves.len(), out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Simulate { config, out, workers, seed, trials_override } => {
            simulate(&config, out, workers, seed, trials_override)
        }
        Cmd::Threshold { results, window, out } => threshold(&results, window, &out),
        Cmd::Figure { recipe, results, config, out } => make_figure(&recipe, &results, config.as_deref(), out),
        Cmd::ValidateConfig { config } => {
            let cfg = RunConfig::load(&config)?;
            let specs = cfg.resolved_specs(None, None)?;
            let points: usize = specs.iter().map(|s| s.distances.len() * s.p.len()).sum();
            println!("{}: ok ({} sweeps, {points} points)", config.display(), specs.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
