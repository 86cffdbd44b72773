use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn wbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wbm")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const SQUARE: &str = r#"{"dim":2,"normals":[[1,0],[0,1],[-1,0],[0,-1]],"offsets":[1,1,1,1]}"#;
const BOX4: &str = r#"{"dim":2,"directions":[[1,0],[0,1],[-1,0],[0,-1]],"weights":[0.1,0.1,0.1,0.1]}"#;

#[test]
fn gaussian_solve_meets_residual() {
    let d = tempfile::tempdir().unwrap();
    let m = write(d.path(), "gaussian.json", r#"{"family":"gaussian"}"#);
    let nu = write(d.path(), "box4.json", BOX4);
    let out_path = d.path().join("report.json");
    let out = wbm(&[
        "solve", "--measure", m.to_str().unwrap(), "--nu", nu.to_str().unwrap(), "--beta", "0.5",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert!(v["converged"].as_bool().unwrap());
    assert!(v["residual_rel"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["body"]["normals"].as_array().unwrap().len(), 4);
}

#[test]
fn non_unit_normal_names_its_index() {
    let d = tempfile::tempdir().unwrap();
    let b = write(d.path(), "bad.json", r#"{"dim":2,"normals":[[1,0],[0,2],[-1,0],[0,-1]],"offsets":[1,1,1,1]}"#);
    let out = wbm(&["mass", "--measure", "lebesgue", "--body", b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("normals[1]"), "{err}");
}

#[test]
fn json_syntax_error_has_position() {
    let d = tempfile::tempdir().unwrap();
    let b = write(d.path(), "broken.json", "{\"dim\": 2,\n \"normals\": [[1,0]\n");
    let out = wbm(&["mass", "--measure", "lebesgue", "--body", b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn unknown_measure_is_an_error() {
    let d = tempfile::tempdir().unwrap();
    let b = write(d.path(), "sq.json", SQUARE);
    let out = wbm(&["mass", "--measure", "cauchy", "--body", b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn minkowski_suite_passes() {
    let out = wbm(&["verify", "minkowski-ineq", "--measure", "lebesgue", "--pairs", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["pass"].as_bool().unwrap());
    let s = &v["suites"][0];
    assert_eq!(s["suite"], "minkowski-ineq");
    assert!(s["property"].as_str().unwrap().contains("F'(mu K)"));
    assert_eq!(s["checked"], 400);
}

#[test]
fn verify_output_is_byte_identical_across_runs_and_threads() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_wbm"))
            .args(["verify", "closure", "--seed", "3"])
            .env("WBM_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    let a = run("1");
    assert!(!a.is_empty());
    assert_eq!(a, run("1"));
    assert_eq!(a, run("2"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_wbm"))
        .args(["verify", "--list"])
        .env("WBM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gaussian_shephard_is_refused() {
    let d = tempfile::tempdir().unwrap();
    let b = write(d.path(), "sq.json", SQUARE);
    let p = b.to_str().unwrap();
    let out = wbm(&["shephard", "--mu", "gaussian", "--nu", "lebesgue", "--K", p, "--L", p]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("log-concave"));
}

#[test]
fn shephard_sweep_csv_columns() {
    let out = wbm(&["shephard", "--mu", "lebesgue", "--nu", "lebesgue", "--bound", "cor_q1", "--pairs", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "pair,bound,lhs,rhs,slack,d_pi_used,hypothesis_margin");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let slack: f64 = r.split(',').nth(4).unwrap().parse().unwrap();
        assert!(slack >= 0.0, "{r}");
    }
}

#[test]
fn square_facet_masses() {
    let d = tempfile::tempdir().unwrap();
    let b = write(d.path(), "sq.json", SQUARE);
    let out = wbm(&["mass", "--measure", "gaussian", "--body", b.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    // e^{-1/2}(2Φ(1) − 1)/√(2π) per facet.
    for m in v["facet_masses"].as_array().unwrap() {
        assert!((m.as_f64().unwrap() - 0.165_190_871_034).abs() < 1e-10);
    }
    let lebesgue = json(&wbm(&["mass", "--measure", "lebesgue", "--body", b.to_str().unwrap()]));
    assert_eq!(lebesgue["mass"].as_f64(), Some(4.0));
}

#[test]
fn gen_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    for dir in [&a, &b] {
        let out = wbm(&["gen", "--kind", "zonotope", "--dim", "2", "--pairs", "3", "--seed", "0", "--out-dir", dir.to_str().unwrap()]);
        assert!(out.status.success());
    }
    for i in 0..3 {
        for t in ["K", "L"] {
            let f = format!("pair_{i:03}_{t}.json");
            assert_eq!(std::fs::read(a.join(&f)).unwrap(), std::fs::read(b.join(&f)).unwrap());
        }
    }
}

#[test]
fn lambda_probe_reports_both_tails() {
    let out = wbm(&["lambda-check", "--measure", "gaussian", "--dim", "3", "--beta", "0.5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["limit_at_zero_trend"], true);
}
