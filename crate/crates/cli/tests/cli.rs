//! End-to-end runs of the `dpp` binary against the shipped configs.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dpp"))
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn run_three_point_scenario() {
    let out = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["run", "--config"])
        .arg(repo_config("tow_3point.toml"))
        .arg("--out")
        .arg(out.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.path().join("solution_from_below.csv")).unwrap();
    // Point 0.5 has index 2 on this lattice (-0.5, 0, 0.5, 1, 1.5).
    let mid: f64 = csv.lines().nth(3).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((mid - 0.5).abs() <= 1e-10);
    assert!(out.path().join("verification_report.json").exists());
    assert!(out.path().join("resolved_config.toml").exists());
    assert!(out.path().join("domain.csv").exists());
}

#[test]
fn run_eikonal_scenario_and_reports() {
    let out = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["run", "--config"])
        .arg(repo_config("eikonal_1d.toml"))
        .arg("--out")
        .arg(out.path())
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out.path().join("solve_report_from_below.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["report"]["monotone_violations"], 0);
    assert!(report["config"]["domain"]["epsilon"].as_f64().unwrap() == 0.25);
}

#[test]
fn invalid_config_exits_2() {
    let out = tempfile::tempdir().unwrap();
    let bad = out.path().join("bad.toml");
    // h >= epsilon must be rejected with the constraint named.
    std::fs::write(
        &bad,
        r#"
kind = "stationary"
[domain]
shape = { kind = "interval", a = 0.0, b = 1.0 }
h = 0.3
epsilon = 0.25
collar = 0.3
[operator]
kind = "tug-of-war"
"#,
    )
    .unwrap();
    let output = bin()
        .args(["run", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("epsilon"), "{stderr}");
}

#[test]
fn sweep_exponent_collapses_to_tow() {
    let out = tempfile::tempdir().unwrap();
    let cfg = out.path().join("ps2d.toml");
    std::fs::write(
        &cfg,
        r#"
kind = "stationary"
[domain]
shape = { kind = "disk", radius = 0.4 }
h = 0.08
epsilon = 0.25
collar = 0.5
[operator]
kind = "peres-sheffield"
exponent = 10.0
"#,
    )
    .unwrap();
    // 1 + 4/h^2 = 626; the last value is past the collapse threshold.
    let output = bin()
        .args(["sweep", "--param", "exponent", "--values", "10,100,700", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let csv = std::fs::read_to_string(out.path().join("sweep.csv")).unwrap();
    let last_metric: f64 =
        csv.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(last_metric, 0.0, "collapse regime must match tug-of-war exactly");
}

#[test]
fn exhausted_iteration_budget_exits_3() {
    let out = tempfile::tempdir().unwrap();
    let cfg = out.path().join("starved.toml");
    std::fs::write(
        &cfg,
        r#"
kind = "stationary"
[domain]
shape = { kind = "interval", a = 0.0, b = 1.0 }
h = 0.05
epsilon = 0.25
collar = 0.25
[operator]
kind = "eikonal"
payoff = { kind = "constant", value = 1.0 }
[solve]
tolerance = 1e-12
max-iterations = 2
"#,
    )
    .unwrap();
    let output = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn sweep_epsilon_consistency_ladder_decreases() {
    let out = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["sweep", "--param", "epsilon", "--values", "0.2,0.1", "--config"])
        .arg(repo_config("parabolic_consistency.toml"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let csv = std::fs::read_to_string(out.path().join("sweep.csv")).unwrap();
    let metrics: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(metrics[1] < metrics[0]);
}

#[test]
fn verify_subcommand_writes_report() {
    let out = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["verify", "--config"])
        .arg(repo_config("eikonal_1d.toml"))
        .arg("--out")
        .arg(out.path())
        .arg("--seed")
        .arg("3")
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out.path().join("verification_report.json")).unwrap(),
    )
    .unwrap();
    let checks = report["report"]["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"].as_bool().unwrap()));
}

#[test]
fn identical_config_and_seed_reproduce_artifacts() {
    let out1 = tempfile::tempdir().unwrap();
    let out2 = tempfile::tempdir().unwrap();
    for out in [&out1, &out2] {
        let status = bin()
            .args(["run", "--config"])
            .arg(repo_config("tow_3point.toml"))
            .arg("--out")
            .arg(out.path())
            .arg("--seed")
            .arg("11")
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["solution_from_below.csv", "solution_from_above.csv", "resolved_config.toml"] {
        let a = std::fs::read(out1.path().join(name)).unwrap();
        let b = std::fs::read(out2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn snapshots_and_seed_barrier_override() {
    let out = tempfile::tempdir().unwrap();
    let cfg = out.path().join("tow.toml");
    std::fs::write(
        &cfg,
        r#"
kind = "stationary"
[domain]
shape = { kind = "interval", a = 0.0, b = 1.0 }
h = 0.047619047619047616
epsilon = 0.1
collar = 0.1
[operator]
kind = "tug-of-war"
boundary = { kind = "affine", coefficients = [1.0, 0.0] }
[solve]
direction = "from-above"
seed-barrier = "biased-tow-exp"
tolerance = 1e-10
"#,
    )
    .unwrap();
    let status = bin()
        .args(["run", "--snapshot-every", "5", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(out.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.path().join("iterate_from_above_5.csv").exists());
    assert!(out.path().join("solution_from_above.csv").exists());
}

#[test]
fn dump_domain_emits_partitions() {
    let out = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["dump-domain", "--config"])
        .arg(repo_config("mcf_disk.toml"))
        .arg("--out")
        .arg(out.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.path().join("domain.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "index,x,y,role,layer,annulus");
    // Annulus indices run 1..=8 on the admissible disk.
    let max_annulus = csv
        .lines()
        .skip(1)
        .filter_map(|l| l.split(',').nth(5))
        .filter_map(|s| s.parse::<u32>().ok())
        .max()
        .unwrap();
    assert_eq!(max_annulus, 8);
}
