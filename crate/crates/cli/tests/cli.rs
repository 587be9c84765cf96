//! End-to-end tests of the binary: subcommands, file formats, exit codes,
//! and the determinism contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polyspline"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(path: &Path, contents: &str) {
    std::fs::write(path, contents).unwrap();
}

/// Config with K = 4 on a grid of 16 points, single-mode cosine data.
fn setup_fit(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let grid_m = 16usize;
    for j in 0..3 {
        let amp = (j + 1) as f64;
        let mut rows = String::new();
        for k in 0..grid_m {
            let y = 2.0 * std::f64::consts::PI * k as f64 / grid_m as f64;
            rows.push_str(&format!("{:.17e}\n", amp * y.cos()));
        }
        write(&dir.join(format!("slice{j}.csv")), &rows);
    }
    let model_path = dir.join("model.json");
    let report_path = dir.join("fit_report.json");
    let config = format!(
        r#"{{
  "p": 2,
  "knots": [0.0, 1.0, 2.0],
  "n": 1,
  "trunc_radius": 4,
  "grid_m": {grid_m},
  "data": {{"slices": ["{}", "{}", "{}"]}},
  "output": {{"model": "{}", "report": "{}"}},
  "seed": 42
}}"#,
        dir.join("slice0.csv").display(),
        dir.join("slice1.csv").display(),
        dir.join("slice2.csv").display(),
        model_path.display(),
        report_path.display(),
    );
    let config_path = dir.join("config.json");
    write(&config_path, &config);
    (config_path, model_path, report_path)
}

#[test]
fn fit_writes_model_with_all_modes() {
    let dir = tempfile::tempdir().unwrap();
    let (config, model_path, report_path) = setup_fit(dir.path());
    let out = run(&["fit", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&model_path).unwrap()).unwrap();
    // 2K+1 = 9 mode entries for n = 1, K = 4
    assert_eq!(model["modes"].as_array().unwrap().len(), 9);
    assert_eq!(model["real_data"], serde_json::Value::Bool(true));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["mode_count"], 9);
    assert!(report["hyperplane_residual"].as_f64().unwrap() <= 1e-9);
    for e in report["discarded_energy"].as_array().unwrap() {
        assert!(e.as_f64().unwrap() <= 1e-20);
    }
}

#[test]
fn fit_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (config, model_path, _) = setup_fit(dir.path());
    assert!(run(&["fit", "--config", config.to_str().unwrap()]).status.success());
    let first = std::fs::read(&model_path).unwrap();
    assert!(run(&["fit", "--config", config.to_str().unwrap()]).status.success());
    let second = std::fs::read(&model_path).unwrap();
    assert_eq!(first, second, "model files must be byte-identical");
}

#[test]
fn fit_zero_data_gives_zero_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let (config, model_path, _) = setup_fit(dir.path());
    for j in 0..3 {
        write(&dir.path().join(format!("slice{j}.csv")), &"0.0\n".repeat(16));
    }
    assert!(run(&["fit", "--config", config.to_str().unwrap()]).status.success());
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&model_path).unwrap()).unwrap();
    for mode in model["modes"].as_array().unwrap() {
        for part in ["re", "im"] {
            for v in mode[part]["values"].as_array().unwrap() {
                assert_eq!(v.as_f64().unwrap(), 0.0);
            }
        }
    }
}

#[test]
fn eval_reproduces_slices_on_hyperplanes() {
    let dir = tempfile::tempdir().unwrap();
    let (config, model_path, _) = setup_fit(dir.path());
    assert!(run(&["fit", "--config", config.to_str().unwrap()]).status.success());

    let csv_path = dir.path().join("grid.csv");
    // the eval grid passes through all three knot hyperplanes at grid nodes
    let y0 = 2.0 * std::f64::consts::PI * 3.0 / 16.0;
    let out = run(&[
        "eval",
        "--model",
        model_path.to_str().unwrap(),
        "--grid",
        &format!("t=0,1,2;y={y0}"),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,y1,value");
    for (j, line) in lines.enumerate() {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let want = (j as f64 + 1.0) * y0.cos();
        assert!(
            (fields[2] - want).abs() <= 1e-9 * want.abs().max(1.0),
            "row {j}: value {} want {want}",
            fields[2]
        );
    }
}

#[test]
fn eval_single_point_and_derivative_column() {
    let dir = tempfile::tempdir().unwrap();
    let (config, model_path, _) = setup_fit(dir.path());
    assert!(run(&["fit", "--config", config.to_str().unwrap()]).status.success());
    let csv_path = dir.path().join("point.csv");
    let out = run(&[
        "eval",
        "--model",
        model_path.to_str().unwrap(),
        "--grid",
        "t=0.5:0.5:1;y=1.0",
        "--out",
        csv_path.to_str().unwrap(),
        "--deriv",
        "1,1",
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "header plus a single row");
    assert_eq!(lines[0], "t,y1,value,d_1_1");
}

#[test]
fn eval_rejects_excessive_derivative() {
    let dir = tempfile::tempdir().unwrap();
    let (config, model_path, _) = setup_fit(dir.path());
    assert!(run(&["fit", "--config", config.to_str().unwrap()]).status.success());
    let out = run(&[
        "eval",
        "--model",
        model_path.to_str().unwrap(),
        "--grid",
        "t=0.5:0.5:1;y=1.0",
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
        "--deriv",
        "2,1",
    ]);
    // p = 2: total order 3 > 2p-2 = 2
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_rejects_malformed_model() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    write(&bad, "{\"not\": \"a model\"}");
    let out = run(&[
        "eval",
        "--model",
        bad.to_str().unwrap(),
        "--grid",
        "t=0:1:2;y=0",
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_kernel_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (config, _, _) = setup_fit(dir.path());
    let report_path = dir.path().join("verify.json");
    let out = run(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        "--suite",
        "kernel",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    assert_eq!(report["seed"], 42);
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["pass"].as_bool().unwrap(), "{}", c["name"]);
        assert!(c["anchor"].is_string());
    }
}

#[test]
fn verify_unknown_suite_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (config, _, _) = setup_fit(dir.path());
    let out = run(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        "--suite",
        "nonsense",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seminorm_report_cross_checks() {
    let dir = tempfile::tempdir().unwrap();
    let (config, model_path, _) = setup_fit(dir.path());
    assert!(run(&["fit", "--config", config.to_str().unwrap()]).status.success());
    let out = run(&["seminorm", "--model", model_path.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["total"].as_f64().unwrap() > 0.0);
    assert!(report["max_route_gap"].as_f64().unwrap() <= 1e-7);
    for mode in report["modes"].as_array().unwrap() {
        assert!(mode["route_gap_rel"].as_f64().unwrap() <= 1e-7);
    }
}

#[test]
fn seminorm_of_constant_data_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (config, model_path, _) = setup_fit(dir.path());
    for j in 0..3 {
        write(&dir.path().join(format!("slice{j}.csv")), &"2.5\n".repeat(16));
    }
    assert!(run(&["fit", "--config", config.to_str().unwrap()]).status.success());
    let out = run(&["seminorm", "--model", model_path.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["total"].as_f64().unwrap().abs() <= 1e-18);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    // grid too coarse for the truncation radius
    write(
        &bad,
        r#"{"p": 2, "knots": [0.0, 1.0, 2.0], "n": 1, "trunc_radius": 4, "grid_m": 5}"#,
    );
    let out = run(&["fit", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let missing = run(&["fit", "--config", "/nonexistent/config.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn data_shape_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let (config, _, _) = setup_fit(dir.path());
    // wrong sample count in one slice
    write(&dir.path().join("slice1.csv"), "1.0\n2.0\n");
    let out = run(&["fit", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bundle_data_source_works() {
    let dir = tempfile::tempdir().unwrap();
    let grid_m = 8usize;
    let mut slices = Vec::new();
    for j in 0..3 {
        let mut slice = Vec::new();
        for k in 0..grid_m {
            let y = 2.0 * std::f64::consts::PI * k as f64 / grid_m as f64;
            slice.push((j as f64 - 1.0) * (2.0 * y).sin());
        }
        slices.push(slice);
    }
    let bundle = dir.path().join("data.json");
    write(
        &bundle,
        &serde_json::to_string(&serde_json::json!({ "slices": slices })).unwrap(),
    );
    let model_path = dir.path().join("model.json");
    let config_path = dir.path().join("config.json");
    write(
        &config_path,
        &format!(
            r#"{{
  "p": 2,
  "knots": [0.0, 1.0, 2.0],
  "n": 1,
  "trunc_radius": 3,
  "grid_m": {grid_m},
  "data": {{"bundle": "{}"}},
  "output": {{"model": "{}"}}
}}"#,
            bundle.display(),
            model_path.display()
        ),
    );
    let out = run(&["fit", "--config", config_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(model_path.exists());
}
