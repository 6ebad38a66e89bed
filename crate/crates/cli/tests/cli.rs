use std::path::Path;
use std::process::{Command, Output};

use tailored_surface::experiments::{read_csv, write_csv, PointResult};

fn tsurf(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsurf")).args(args).current_dir(cwd).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const MINIMAL: &str = r#"
[[experiment]]
name = "css"
family = "css"
distances = [3]
noise = { kind = "iid" }
metric = "manhattan"
p = [0.1]
trials = 100
"#;

#[test]
fn minimal_config_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), MINIMAL).unwrap();
    let o = tsurf(&["simulate", "--config", "run.toml", "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("out/css.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].trials, 100);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/css.json")).unwrap()).unwrap();
    assert_eq!(manifest["spec"]["seed"], 0);
    assert_eq!(manifest["rows"], 1);
}

#[test]
fn grid_is_cartesian_and_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = MINIMAL
        .replace("distances = [3]", "distances = [3, 5, 7, [3, 5]]")
        .replace("p = [0.1]", "p = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07]");
    std::fs::write(dir.path().join("run.toml"), cfg).unwrap();
    let o = tsurf(&["simulate", "--config", "run.toml", "--out", "out", "--seed", "77", "--trials-override", "20"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("out/css.csv")).unwrap();
    assert_eq!(rows.len(), 28);
    assert!(rows.iter().all(|r| r.seed == 77 && r.trials == 20));
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = MINIMAL
        .replace("family = \"css\"", "family = \"mmhh\"")
        .replace("noise = { kind = \"iid\" }", "noise = { kind = \"gaussian\", sigma_p = 0.5, sigma_tot = 0.5 }")
        .replace("distances = [3]", "distances = [3, 5]")
        .replace("trials = 100", "trials = 500");
    std::fs::write(dir.path().join("run.toml"), cfg).unwrap();
    for (w, out) in [("1", "a"), ("3", "b")] {
        let o = tsurf(&["simulate", "--config", "run.toml", "--out", out, "--workers", w], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = std::fs::read(dir.path().join("a/css.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/css.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_errors_exit_with_2_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (MINIMAL.replace("p = [0.1]", "p = [-0.1]"), "p[0]"),
        (MINIMAL.replace("trials = 100", "trials = 100\ntrails = 3"), "trails"),
        (MINIMAL.replace("family = \"css\"", "family = \"abc\""), "abc"),
        ("figure = \"fig99\"\n".to_string(), "fig99"),
    ];
    for (cfg, needle) in cases {
        std::fs::write(dir.path().join("bad.toml"), &cfg).unwrap();
        for cmd in ["validate-config", "simulate"] {
            let o = tsurf(&[cmd, "--config", "bad.toml"], dir.path());
            assert_eq!(o.status.code(), Some(2), "{cmd} {needle}: {}", stderr(&o));
            assert!(stderr(&o).contains(needle), "{cmd}: {}", stderr(&o));
        }
    }
    assert!(!dir.path().join("results").exists());
    std::fs::write(dir.path().join("ok.toml"), MINIMAL).unwrap();
    assert_eq!(tsurf(&["validate-config", "--config", "ok.toml"], dir.path()).status.code(), Some(0));
}

fn synthetic_rows(p_th: f64, nu: f64, slope: f64) -> Vec<PointResult> {
    let mut rows = Vec::new();
    for d in [5usize, 7, 9, 11] {
        for i in 0..9 {
            let p = p_th - 0.02 + 0.005 * i as f64;
            let x = (p - p_th) * (d as f64).powf(1.0 / nu);
            let p_fail = 0.3 + slope * x + 2.0 * x * x;
            rows.push(PointResult {
                family: "css".into(),
                metric: "manhattan".into(),
                d1: d,
                d2: d,
                p,
                sigma_p: 0.0,
                sigma_tot: 0.0,
                pair_kind: "none".into(),
                p2: 0.0,
                trials: 100_000,
                failures: (p_fail * 1e5).round() as u64,
                p_fail,
                stderr: 0.0015,
                seed: 1,
                layout: "non_rotated".into(),
                x_flips: 0,
                z_flips: 0,
                y_flips: 0,
            });
        }
    }
    rows
}

#[test]
fn threshold_recovers_synthetic_crossing() {
    let dir = tempfile::tempdir().unwrap();
    write_csv(&dir.path().join("syn.csv"), &synthetic_rows(0.16, 1.5, 1.2)).unwrap();
    let o = tsurf(&["threshold", "--results", "*.csv", "--window", "0.14,0.18", "--out", "fit.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let fits: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    let p_th = fits[0]["fit"]["p_th"].as_f64().unwrap();
    assert!((p_th - 0.16).abs() < 0.002, "{p_th}");
    assert!(String::from_utf8_lossy(&o.stdout).contains("p_th = 0.16"));
}

#[test]
fn threshold_reports_flat_and_missing_data() {
    let dir = tempfile::tempdir().unwrap();
    write_csv(&dir.path().join("flat.csv"), &synthetic_rows(0.16, 1.5, 0.0)).unwrap();
    let o = tsurf(&["threshold", "--results", "flat.csv", "--window", "0.14,0.18"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stdout).contains("insufficient data"));
    let o = tsurf(&["threshold", "--results", "nothing/*.csv", "--window", "0.14,0.18"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn figure_lists_all_missing_inputs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("empty")).unwrap();
    let o = tsurf(&["figure", "fig5a", "--results", "empty"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let msg = stderr(&o);
    assert!(msg.contains("16 missing"), "{msg}");
    assert!(msg.contains("fig5a-mmhh-sp0.5") && msg.contains("d=(11,11)"), "{msg}");
}

#[test]
fn figure_is_reproducible_from_csv_alone() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("f7.toml"),
        "figure = \"fig7\"\nout = \"res\"\n[recipe]\ntrials = 300\ndistances = [3, 5]\n",
    )
    .unwrap();
    let o = tsurf(&["simulate", "--config", "f7.toml"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["fig7-manhattan.json", "fig7-degeneracy.json", "fig7-degeneracy_correlation.json"] {
        std::fs::remove_file(dir.path().join("res").join(f)).unwrap();
    }
    let run = |out: &str| {
        let o = tsurf(&["figure", "fig7", "--results", "res", "--config", "f7.toml", "--out", out], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    };
    run("a");
    run("b");
    for f in ["manhattan.tsv", "degeneracy.tsv", "degeneracy_correlation.tsv", "fig7.svg", "fig7.json"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        assert_eq!(a, std::fs::read(dir.path().join("b").join(f)).unwrap(), "{f}");
    }
    let tsv = std::fs::read_to_string(dir.path().join("a/manhattan.tsv")).unwrap();
    assert!(tsv.contains("# sweep") && tsv.contains("\"seed\":0"));
    assert_eq!(tsv.lines().filter(|l| !l.starts_with('#')).count(), 3);
    assert!(std::fs::read_to_string(dir.path().join("a/fig7.svg")).unwrap().starts_with("<svg"));
}
