use std::fs;
use std::process::{Command, Output};

use mopuc::json::{parse_matrix, parse_verblunsky};
use mopuc::linalg::{max_abs_diff, unitarity_defect};
use serde_json::Value;

fn mopuc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mopuc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sample_emits_unitaries() {
    let o = mopuc(&["sample", "haar", "--n", "4", "--samples", "3", "--seed", "9"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 3);
    for m in list {
        let u = parse_matrix(&m.to_string()).unwrap();
        assert!(unitarity_defect(&u) < 1e-12);
    }
}

#[test]
fn sample_is_reproducible() {
    let a = mopuc(&["sample", "corner", "--n", "9", "-p", "2", "--seed", "4"]);
    let b = mopuc(&["sample", "corner", "--n", "9", "-p", "2", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn methods_agree_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let u_path = dir.path().join("u.json");
    let o = mopuc(&["sample", "haar", "--n", "10", "--seed", "2"]);
    let list: Value = serde_json::from_str(&stdout(&o)).unwrap();
    fs::write(&u_path, list[0].to_string()).unwrap();
    let u = u_path.to_str().unwrap();

    let m_path = dir.path().join("mu.json");
    assert!(mopuc(&["measure", "--matrix", u, "-p", "2", "--out", m_path.to_str().unwrap()]).status.success());
    let by_moments = mopuc(&["verblunsky", "--measure", m_path.to_str().unwrap(), "--count", "3"]);
    let by_deflation = mopuc(&["verblunsky", "--method", "deflation", "--matrix", u, "-p", "2", "--count", "3"]);
    assert!(by_moments.status.success() && by_deflation.status.success());
    let a = parse_verblunsky(&stdout(&by_moments)).unwrap();
    let b = parse_verblunsky(&stdout(&by_deflation)).unwrap();
    for j in 0..3 {
        assert!(max_abs_diff(a.alpha(j), b.alpha(j)) < 1e-8);
    }
}

#[test]
fn ggt_and_rate_from_sequence_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seq.json");
    fs::write(&path, r#"{"p": 1, "coeffs": [[[[0.5, 0.0]]]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let g = mopuc(&["ggt", "--input", p, "--blocks", "2"]);
    assert!(g.status.success());
    let m = parse_matrix(&stdout(&g)).unwrap();
    assert_eq!(m.shape(), (2, 2));
    assert!((m[(0, 0)].re - 0.5).abs() < 1e-15);
    assert!((m[(1, 0)].norm() - 0.75f64.sqrt()).abs() < 1e-15);
    let r = mopuc(&["rate", "seq", "--input", p]);
    let v: Value = serde_json::from_str(&stdout(&r)).unwrap();
    assert!((v["value"].as_f64().unwrap() + 0.75f64.ln()).abs() < 1e-15);
}

#[test]
fn boundary_ball_rate_prints_infinity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.json");
    fs::write(&path, "[[[1.0, 0.0]]]").unwrap();
    let r = mopuc(&["rate", "ball", "--input", path.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&r)).unwrap();
    assert_eq!(v["value"], "+inf");
    assert_eq!(v["first_infinite"], 0);
}

#[test]
fn verify_reports_are_deterministic_and_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let run = || {
        let o = mopuc(&["verify", "verblunsky-law", "--n", "9", "-p", "2", "--samples", "300", "--seed", "5", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let mut v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    let first = run();
    assert_eq!(first, run());
    assert_eq!(first["config"]["Q"], 4);
    assert_eq!(first["tests"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_reads_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": "ldp-decay", "sizes": [100, 300], "point": 0.3}"#).unwrap();
    let o = mopuc(&["verify", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("experiment,test,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn failed_verdict_exits_one() {
    // a tolerance no floating-point run can meet
    let o = mopuc(&["verify", "szego-identity", "--samples", "3", "--tolerance", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mopuc(&["verify", "verblunsky-law", "--n", "4", "-p", "2"]).status.code(), Some(2));
    assert_eq!(mopuc(&["verify", "no-such-experiment"]).status.code(), Some(2));
    assert_eq!(mopuc(&["sample", "corner", "--n", "4", "-p", "2"]).status.code(), Some(2));
    assert_eq!(mopuc(&["rate", "ball", "--input", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(mopuc(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unknown_config_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": "clt", "sample": 10}"#).unwrap();
    assert_eq!(mopuc(&["verify", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
