//! End-to-end tests of the binary: exit-code contract, output files, and
//! the run-to-run determinism criterion.

use std::path::Path;
use std::process::{Command, Output};

fn qspline(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qspline"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn criterion_8_table_runs_are_byte_identical() {
    // identical manifests must produce byte-identical outputs, including
    // across working directories
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let args = ["table", "--clock-qubits", "4", "--out", "t"];
    assert!(qspline(dir_a.path(), &args).status.success());
    assert!(qspline(dir_b.path(), &args).status.success());
    for name in ["t.table.json", "t.table.txt", "t.manifest.json"] {
        let a = read(dir_a.path(), name);
        let b = read(dir_b.path(), name);
        let identical = a == b;
        println!("ACCEPTANCE 8 [{}] {name} byte-identical across runs",
                 if identical { "PASS" } else { "FAIL" });
        assert!(identical, "{name} differs between identical runs");
    }
}

#[test]
fn fit_classical_sigmoid_writes_metrics_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = qspline(
        dir.path(),
        &["fit", "--activation", "sigmoid", "--mode", "classical", "--out", "s"],
    );
    assert!(out.status.success());
    let metrics: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "s.metrics.json")).unwrap();
    let rss = metrics["rss_classic"].as_f64().unwrap();
    assert!(rss > 0.0 && rss < 1e-5, "rss_classic = {rss}");
    assert!(metrics["rss_hybrid"].is_null());

    let csv = String::from_utf8(read(dir.path(), "s.curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x,f_true,f_classic,f_hybrid,f_full,interval_fidelity"
    );
    assert_eq!(lines.count(), 100);

    let manifest: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "s.manifest.json")).unwrap();
    assert_eq!(manifest["command"], "fit");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn fit_ideal_hybrid_matches_classical() {
    let dir = tempfile::tempdir().unwrap();
    let out = qspline(
        dir.path(),
        &[
            "fit", "--activation", "relu", "--mode", "hybrid", "--backend", "ideal",
            "--out", "r",
        ],
    );
    assert!(out.status.success());
    let metrics: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "r.metrics.json")).unwrap();
    let classic = metrics["rss_classic"].as_f64().unwrap();
    let hybrid = metrics["rss_hybrid"].as_f64().unwrap();
    assert!((classic - hybrid).abs() < 1e-10);
    assert_eq!(metrics["average_fidelity"].as_f64().unwrap(), 1.0);
}

#[test]
fn table_with_ideal_backend_reports_unit_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let out = qspline(dir.path(), &["table", "--backend", "ideal", "--out", "t"]);
    assert!(out.status.success());
    let rows: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "t.table.json")).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert!((row["average_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn complexity_prints_crossover_and_writes_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = qspline(
        dir.path(),
        &["complexity", "--s", "3", "--kappa", "2", "--eps", "0.5", "--out", "c"],
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.contains("crossover: n = 45"),
        "stdout was: {stdout}"
    );
    let csv = String::from_utf8(read(dir.path(), "c.curves.csv")).unwrap();
    assert!(csv.starts_with("n,algorithm,cost,band_min,band_max\n"));
    // five algorithms per n over [2, 1000]
    assert_eq!(csv.lines().count() - 1, 999 * 5);
    let json: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "c.crossover.json")).unwrap();
    assert_eq!(json["hhl_vs_conjugate_gradient"].as_u64(), Some(45));
}

#[test]
fn missing_activation_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qspline(dir.path(), &["fit", "--mode", "classical"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("--activation"), "stderr: {stderr}");
}

#[test]
fn invalid_clock_width_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qspline(
        dir.path(),
        &["fit", "--activation", "sigmoid", "--mode", "hybrid", "--clock-qubits", "0"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_of_range_eps_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qspline(dir.path(), &["complexity", "--eps", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("tolerance"), "stderr: {stderr}");
}

#[test]
fn numerical_failure_exits_3_and_names_the_interval() {
    let dir = tempfile::tempdir().unwrap();
    // an absurd evolution time overflows the clock register on interval 0
    let out = qspline(
        dir.path(),
        &[
            "fit", "--activation", "sigmoid", "--mode", "hybrid",
            "--evolution-time", "1e6", "--out", "x",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("interval 0"), "stderr: {stderr}");
}

#[test]
fn seeded_shot_mode_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--seed", "11", "fit", "--activation", "tanh", "--mode", "full",
        "--backend", "ideal", "--shots", "2048", "--out", "m",
    ];
    assert!(qspline(dir.path(), &args).status.success());
    let first = read(dir.path(), "m.metrics.json");
    assert!(qspline(dir.path(), &args).status.success());
    let second = read(dir.path(), "m.metrics.json");
    assert_eq!(first, second);
}
