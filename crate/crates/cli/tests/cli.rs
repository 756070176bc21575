//! End-to-end tests of the command-line interface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_polefit")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn polefit")
}

fn write_samples(path: &Path, rho: f64, n: usize, f: impl Fn(f64, f64) -> (f64, f64)) {
    let m = 2 * n;
    let mut values = Vec::new();
    for j in 0..m {
        let ang = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let (re, im) = (rho * ang.cos(), rho * ang.sin());
        let (vr, vi) = f(re, im);
        values.push(format!("[{vr},{vi}]"));
    }
    std::fs::write(
        path,
        format!("{{\"rho\": {rho}, \"values\": [{}]}}", values.join(",")),
    )
    .unwrap();
}

fn pole_fn(re: f64, im: f64) -> (f64, f64) {
    // 1/(z - 2)
    let (dr, di) = (re - 2.0, im);
    let d = dr * dr + di * di;
    (dr / d, -di / d)
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polefit_cli_{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn coeffs_roundtrip() {
    let dir = tmpdir("coeffs");
    let samples = dir.join("samples.json");
    write_samples(&samples, 1.0, 16, pole_fn);
    let out_path = dir.join("coeffs.json");
    let out = run(&[
        "coeffs",
        "--samples",
        samples.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["n"], 16);
    let coeffs = v["coeffs"].as_array().unwrap();
    assert_eq!(coeffs.len(), 33);
    // c_0 = -1/2
    let c0 = coeffs.iter().find(|e| e["k"] == 0).unwrap();
    assert!((c0["re"].as_f64().unwrap() + 0.5).abs() < 1e-9);
}

#[test]
fn coeffs_check_estimates_error() {
    let dir = tmpdir("coeffs_check");
    let samples = dir.join("samples4n.json");
    write_samples(&samples, 1.0, 32, pole_fn); // 64 values = 4n with n = 16
    let out_path = dir.join("coeffs.json");
    let out = run(&[
        "coeffs",
        "--samples",
        samples.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--check",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["n"], 16);
    let c0 = v["coeffs"].as_array().unwrap().iter().find(|e| e["k"] == 0).unwrap().clone();
    assert!(c0["err_estimate"].as_f64().unwrap() > 0.0);
}

#[test]
fn fit_poles_eval_flow() {
    let dir = tmpdir("flow");
    let samples = dir.join("samples.json");
    write_samples(&samples, 1.0, 64, pole_fn);
    let model = dir.join("model.json");
    let out = run(&[
        "fit",
        "--samples",
        samples.to_str().unwrap(),
        "--rho",
        "1.0",
        "--n1",
        "5",
        "--m1",
        "5",
        "--tol",
        "1e-12",
        "--seed",
        "3",
        "--z0",
        "-1.2+0i",
        "--out",
        model.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(&["poles", "--model", model.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("plus"), "{text}");
    assert!(text.contains("1 estimates in 1 clusters"), "{text}");

    let grid = dir.join("grid.csv");
    let out = run(&[
        "eval",
        "--model",
        model.to_str().unwrap(),
        "--re",
        "-1:1:5",
        "--im",
        "-1:1:5",
        "--out",
        grid.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&grid).unwrap();
    assert_eq!(text.lines().count(), 26); // header + 25 points
    assert!(text.starts_with("re,im,abs,arg"));
}

#[test]
fn fit_rejects_rho_mismatch_with_exit_2() {
    let dir = tmpdir("rho_mismatch");
    let samples = dir.join("samples.json");
    write_samples(&samples, 1.0, 16, pole_fn);
    let out = run(&[
        "fit",
        "--samples",
        samples.to_str().unwrap(),
        "--rho",
        "0.9",
        "--n1",
        "4",
        "--m1",
        "4",
        "--out",
        dir.join("m.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fit_analytic_function_exits_3() {
    let dir = tmpdir("analytic");
    let samples = dir.join("samples.json");
    // f(z) = z: no poles on either side
    write_samples(&samples, 1.0, 16, |re, im| (re, im));
    let out = run(&[
        "fit",
        "--samples",
        samples.to_str().unwrap(),
        "--rho",
        "1.0",
        "--n1",
        "4",
        "--m1",
        "4",
        "--tol",
        "1e-10",
        "--out",
        dir.join("m.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("analytic"));
}

#[test]
fn malformed_samples_exit_2() {
    let dir = tmpdir("malformed");
    let samples = dir.join("samples.json");
    std::fs::write(&samples, "{\"rho\": 1.0, \"values\": [[1.0]]}").unwrap();
    let out = run(&[
        "coeffs",
        "--samples",
        samples.to_str().unwrap(),
        "--out",
        dir.join("c.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("values[0]"));
}

#[test]
fn demo_exfun_writes_artifacts() {
    let dir = tmpdir("demo");
    let out = run(&["demo", "exfun", "--out-dir", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("model.json").exists());
    assert!(dir.join("poles.csv").exists());
    assert!(dir.join("grid.csv").exists());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("minus: (N, M) = (30, 30)"), "{text}");
}

#[test]
fn pde_report() {
    let dir = tmpdir("pde");
    let report = dir.join("report.json");
    let out = run(&[
        "pde",
        "--times",
        "0:0.4:0.8",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("blow-up time: 0.25"), "{text}");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}
