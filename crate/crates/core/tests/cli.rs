//! End-to-end tests of the `ruelle` binary: artifact shapes, exit codes,
//! and byte-stable reruns.

use std::path::Path;
use std::process::{Command, Output};

fn ruelle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ruelle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

#[test]
fn spectrum_reports_the_leading_triple() {
    let out = ruelle(&["spectrum", "--k", "2", "--depth", "3", "--beta", "-1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // H = (1,2) at β = -1 weights the operator by (1,2): λ = 3
    assert!((report["lambda"].as_f64().unwrap() - 3.0).abs() < 1e-10);
    assert!((report["pressure"].as_f64().unwrap() - 3.0f64.ln()).abs() < 1e-10);
    assert_eq!(report["nu"]["masses"].as_array().unwrap().len(), 8);
    assert_eq!(report["h"]["k"].as_u64().unwrap(), 2);
    assert!(report["iterations"].as_u64().unwrap() > 0);
    assert_eq!(report["run"]["generator"].as_str().unwrap(), "chacha8");
}

#[test]
fn pressure_curve_of_flat_potential_is_constant_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        r#"{"k": 2, "depth": 3,
            "hamiltonian": {"depth": 1, "values": [1.0, 1.0]},
            "beta_grid": {"start": -1.0, "stop": 3.0, "count": 9}}"#,
    )
    .unwrap();
    let out = ruelle(&[
        "pressure-curve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(read(dir.path(), "pressure_curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "beta,pressure,lambda,energy,entropy");
    let ln2 = std::f64::consts::LN_2;
    let mut rows = 0;
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cells[1] - ln2).abs() < 1e-12, "pressure row: {line}");
        assert!((cells[2] - 2.0).abs() < 1e-12, "lambda row: {line}");
        assert!(cells[3].abs() < 1e-12, "energy row: {line}");
        assert!((cells[4] - ln2).abs() < 1e-12, "entropy row: {line}");
        rows += 1;
    }
    assert_eq!(rows, 9);
    assert!(!csv.contains('\r'));
}

#[test]
fn kms_verify_passes_on_the_gibbs_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = ruelle(&[
        "kms-verify",
        "--depth",
        "4",
        "--beta",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "kms_verify.json")).unwrap();
    assert_eq!(report["beta"].as_f64().unwrap(), 1.0);
    assert!(report["battery_size"].as_u64().unwrap() > 10_000);
    assert!(report["max_residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(report["failures"].as_array().unwrap().len(), 0);
    assert!(report["relations"]["max_residual"].as_f64().unwrap() <= 1e-10);
    let steps = report["uniqueness"]["steps"].as_array().unwrap();
    assert!(steps.last().unwrap()["tv_distance"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn kms_verify_fails_closed_on_impossible_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = ruelle(&[
        "kms-verify",
        "--depth",
        "3",
        "--max-level",
        "1",
        "--tol",
        "1e-18",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    // the report is still written, with the offending pairs listed in full
    let report: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "kms_verify.json")).unwrap();
    let failures = report["failures"].as_array().unwrap();
    if let Some(first) = failures.first() {
        assert!(first["a"]["f"]["values"].is_array());
        assert!(first["a"]["n"].is_u64());
        assert!(first["residual"].as_f64().unwrap() > 1e-18);
    }
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"unknown_key": 1}"#).unwrap();
    let out = ruelle(&["spectrum", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let missing = ruelle(&["spectrum", "--config", "/nonexistent/run.json"]);
    assert_eq!(missing.status.code(), Some(2));

    // gamma inside the sigma-finite regime is a configuration error
    let ff = ruelle(&["ff", "--gamma", "1.5"]);
    assert_eq!(ff.status.code(), Some(2));
}

#[test]
fn ff_grid_above_one_is_identically_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = ruelle(&[
        "ff",
        "--gamma",
        "3",
        "--beta-grid",
        "1,2,5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(read(dir.path(), "ff_pressure.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "beta,pressure");
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[1], 0.0, "plateau broken: {line}");
    }
    let summary: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "ff_summary.json")).unwrap();
    assert!((summary["zeta_gamma"].as_f64().unwrap() - 1.2020569031595943).abs() < 1e-10);
    assert!((summary["u"].as_f64().unwrap() - 0.7307629694014369).abs() < 1e-10);
    assert_eq!(summary["nu_masses"].as_array().unwrap().len(), 20);
    assert!(summary["mass_deficit"].as_f64().unwrap() > 0.0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = ruelle(&[
            "kms-verify",
            "--seed",
            "42",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let ff = ruelle(&[
            "ff",
            "--beta-grid",
            "0,1.5,7",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(ff.status.success());
    }
    for name in ["kms_verify.json", "ff_pressure.csv", "ff_summary.json"] {
        assert_eq!(
            read(dir_a.path(), name),
            read(dir_b.path(), name),
            "{name} differs between reruns"
        );
    }
}

#[test]
fn export_rewrites_numbers_canonically() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("artifact.json");
    std::fs::write(&input, r#"{"mass": 0.1, "count": 3}"#).unwrap();
    let out = ruelle(&["export", input.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1.0000000000000001e-1"), "{text}");
    assert!(text.contains("\"count\": 3"), "{text}");

    // with --out the artifact lands as <stem>.canonical.json
    let out = ruelle(&[
        "export",
        input.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(dir.path().join("artifact.canonical.json").exists());
}

#[test]
fn spectrum_reads_potentials_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let pot = dir.path().join("h.json");
    // a serialized depth-1 table on 3 symbols
    std::fs::write(&pot, r#"{"k": 3, "depth": 1, "values": [1.0, 1.0, 1.0]}"#).unwrap();
    let out = ruelle(&[
        "spectrum",
        "--k",
        "3",
        "--depth",
        "2",
        "--beta",
        "1",
        "--hamiltonian",
        pot.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((report["lambda"].as_f64().unwrap() - 3.0).abs() < 1e-10);

    // symbol-count mismatch between --k and the file is rejected
    let out = ruelle(&[
        "spectrum",
        "--k",
        "2",
        "--hamiltonian",
        pot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
