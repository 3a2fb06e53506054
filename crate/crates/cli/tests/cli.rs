use rabi_bloch::ChainKind;
use rabi_bloch_cli::config::{Coupling, Output, ScheduleKind};
use rabi_bloch_cli::runner::{run_analytic, run_compare, run_evolve, run_sweep, Invocation};
use rabi_bloch_cli::RunConfig;
use std::path::Path;
use std::process::Command;

fn inv(command: &str, chain: ChainKind) -> Invocation {
    Invocation {
        command: command.into(),
        preset: None,
        chain,
        notes: vec![],
    }
}

fn short(schedule: ScheduleKind) -> RunConfig {
    RunConfig {
        schedule,
        t_max_periods: 2.0,
        samples_per_period: 8,
        ..RunConfig::default()
    }
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn identical_configs_give_identical_files() {
    for schedule in [ScheduleKind::Constant, ScheduleKind::Rectangular] {
        let cfg = short(schedule);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run_evolve(&cfg, inv("evolve", ChainKind::Equivalent), a.path()).unwrap();
        run_evolve(&cfg, inv("evolve", ChainKind::Equivalent), b.path()).unwrap();
        let fa = read_all(a.path());
        assert_eq!(fa.len(), 5);
        assert_eq!(fa, read_all(b.path()));
    }
}

#[test]
fn heatmap_and_metadata_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short(ScheduleKind::Constant);
    let out = run_evolve(&cfg, inv("evolve", ChainKind::Equivalent), dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("distribution.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let w = out.metadata.params.window;
    assert_eq!(header[0], "t_over_TB");
    assert_eq!(header[1], w.lo().to_string());
    assert_eq!(header.len(), w.len() + 1);
    assert_eq!(lines.count(), 17);

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["params"]["n0"], 1.01e4);
    assert_eq!(meta["derived"]["l"], 28.89);
    assert_eq!(meta["monitors"]["leakage_ok"], true);
    assert!(meta["version"].is_string());
}

#[test]
fn outputs_can_be_selected() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = short(ScheduleKind::Constant);
    cfg.outputs = [Output::Overlaps].into_iter().collect();
    run_evolve(&cfg, inv("evolve", ChainKind::Equivalent), dir.path()).unwrap();
    let names: Vec<String> = read_all(dir.path()).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, ["metadata.json", "overlaps.csv"]);
}

#[test]
fn zero_drive_compares_flat() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        omega_atom: 0.0,
        t_max_periods: 4.0,
        samples_per_period: 16,
        ..RunConfig::default()
    };
    let r = run_compare(&cfg, inv("compare", ChainKind::Effective), dir.path(), false).unwrap();
    assert_eq!(r.periods, 4);
    assert!(r.p_a_max_deviation < 1e-10, "{}", r.p_a_max_deviation);
    // the discrete packet's center lags the continuum formula by L(1 - e^{-α²/4})
    assert!(r.center_max_deviation < 0.1, "{}", r.center_max_deviation);
}

#[test]
fn figure_run_compares_within_plateau_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        t_max_periods: 10.0,
        samples_per_period: 8,
        ..RunConfig::default()
    };
    let r = run_compare(&cfg, inv("compare", ChainKind::Equivalent), dir.path(), true).unwrap();
    assert!(r.p_a_max_deviation <= 0.1);
    assert!(r.cross_chain_max_deviation.unwrap() <= 0.05);
    assert!(dir.path().join("compare.json").exists());
}

#[test]
fn sweep_finds_suppression_near_j0_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        t_max_periods: 10.0,
        samples_per_period: 20,
        outputs: [Output::Overlaps].into_iter().collect(),
        ..RunConfig::default()
    };
    let rows = run_sweep(&cfg, inv("sweep-l", ChainKind::Equivalent), 23.5, 28.5, 51, dir.path()).unwrap();
    assert!(rows.windows(2).all(|w| w[0].l < w[1].l));
    for r in &rows {
        assert_eq!(r.gamma, rabi_bloch::gamma(1.0, r.l).unwrap());
    }
    let minima: Vec<f64> = rows.iter().filter(|r| r.suppressed).map(|r| r.l).collect();
    assert_eq!(minima.len(), 2, "{minima:?}");
    assert!((minima[0] - 24.3525).abs() <= 0.1, "{minima:?}");
    assert!((minima[1] - 27.4935).abs() <= 0.1, "{minima:?}");
}

#[test]
fn analytic_only_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        coupling: Coupling::Extent(20.0),
        ..short(ScheduleKind::Constant)
    };
    let meta = run_analytic(&cfg, inv("analytic", ChainKind::Equivalent), dir.path()).unwrap();
    assert_eq!(meta.files, ["analytic_series.csv", "analytic.csv", "metadata.json"]);
}

#[test]
fn strict_mode_aborts_on_narrow_window() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        window_halfwidth: Some(40),
        strict: true,
        ..short(ScheduleKind::Constant)
    };
    let err = run_evolve(&cfg, inv("evolve", ChainKind::Equivalent), dir.path()).err().unwrap();
    assert!(err.to_string().contains("strict"), "{err}");
    let relaxed = RunConfig { strict: false, ..cfg };
    assert!(run_evolve(&relaxed, inv("evolve", ChainKind::Equivalent), dir.path()).is_ok());
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rabi-bloch"))
}

#[test]
fn binary_runs_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "L = 27.5\nt_max_periods = 1\nsamples_per_period = 8\noutputs = centers\n").unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["evolve", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(&out)
        .arg("--seedless-deterministic")
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("centers.csv").exists());
}

#[test]
fn binary_reports_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "L = 27.5\nomega_ratio_g = 0.07\n").unwrap();
    let out = bin().args(["evolve", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("not both"), "{msg}");

    let out = bin().args(["preset", "fig9"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn binary_writes_the_bessel_table() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["preset", "fig3", "--out-dir"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let points = std::fs::read_to_string(dir.path().join("points.csv")).unwrap();
    assert_eq!(points.lines().count(), 5);
    assert!(points.starts_with("label,x,j0,j1,nearest_j0_zero,nearest_stationary_point"));
}

#[test]
fn fig5_metadata_carries_the_notes() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["preset", "fig5a", "--out-dir"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("metadata.json")).unwrap()).unwrap();
    let notes = meta["invocation"]["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("28.89")));
    assert_eq!(meta["schedule"]["kind"], "rectangular");
}
