use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cohlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn monotones_of_uniform_state() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "u4.json",
        r#"{"dim":4,"amplitudes":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]]}"#,
    );
    let out = cohlab(&["monotones", &f]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["coherence"]["coherence_number"], 4);
    assert!((v["coherence"]["ccN"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["coherence"]["cc"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!(v["concurrence"]["k_values"]["2"].is_number());
}

#[test]
fn monotones_of_basis_and_mixed_states() {
    let dir = tempfile::tempdir().unwrap();
    let b = write(
        dir.path(),
        "b.json",
        r#"{"dim":3,"amplitudes":[[0,0],[1,0],[0,0]]}"#,
    );
    let v = stdout_json(&cohlab(&["monotones", &b]));
    for key in ["cc", "ccN", "l1", "rel_entropy"] {
        assert_eq!(v["coherence"][key].as_f64().unwrap(), 0.0, "{key}");
    }
    assert_eq!(v["coherence"]["coherence_number"], 1);

    let t = 1.0 / 3.0;
    let body = format!(
        r#"{{"dim":3,"matrix":[[[{t},0],[0,0],[0,0]],[[0,0],[{t},0],[0,0]],[[0,0],[0,0],[{t},0]]]}}"#
    );
    let m = write(dir.path(), "i3.json", &body);
    let v = stdout_json(&cohlab(&["monotones", &m, "--log2"]));
    assert_eq!(v["coherence"]["coherence_number"], 1);
    assert_eq!(
        v["coherence"]["log2_coherence_number"].as_f64().unwrap(),
        0.0
    );
    assert_eq!(v["coherence"]["cc_kind"], "estimate (upper bound)");
    assert_eq!(v["coherence"]["certificate"]["feasible"], true);
}

#[test]
fn malformed_state_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", r#"{"dim":2}"#);
    let out = cohlab(&["monotones", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("amplitudes"));
    assert_eq!(
        cohlab(&["monotones", "/definitely/not/here.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn grover_csv_shape() {
    let out = cohlab(&["grover", "1024", "5", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "r,alpha_r,P,coherence_number,ccN,l1,rel_entropy,w"
    );
    assert_eq!(lines.len(), 12);
    assert!(lines[1].starts_with("0,") && lines[1].ends_with(','));
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[2], "0.0048828125");
    assert_eq!(first[4], "1");
}

#[test]
fn grover_small_exact_case() {
    let text = String::from_utf8(cohlab(&["grover", "4", "1", "1", "--statevector-check"]).stdout)
        .unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].ends_with(",max_amp_dev"));
    let last: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
    assert!((last[2] - 1.0).abs() < 1e-12);
    assert_eq!(last[3], 1.0);
    assert!(last[4] < 1e-12);
    assert!(last[8] < 1e-12);
}

#[test]
fn grover_dense_and_json() {
    let text = String::from_utf8(cohlab(&["grover", "1024", "5", "--dense"]).stdout).unwrap();
    assert_eq!(text.lines().count(), 201);
    let v = stdout_json(&cohlab(&["grover", "4", "1", "1", "--format", "json"]));
    assert_eq!(v["points"].as_array().unwrap().len(), 2);
    assert_eq!(v["critical"]["integer_hit"], true);
}

#[test]
fn grover_usage_errors() {
    assert_eq!(cohlab(&["grover", "4", "4"]).status.code(), Some(2));
    assert_eq!(cohlab(&["grover", "4", "0"]).status.code(), Some(2));
    assert_eq!(
        cohlab(&["grover", "12", "1", "--statevector-check"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cohlab(&["grover", "8192", "1", "2", "--statevector-check"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn convert_examples() {
    let dir = tempfile::tempdir().unwrap();
    let h = 1.0 / 3f64.sqrt();
    let u = write(
        dir.path(),
        "u3.json",
        &format!(r#"{{"dim":3,"amplitudes":[[{h},0],[{h},0],[{h},0]]}}"#),
    );
    let out = cohlab(&["convert", &u]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["conversion"]["k_values"]["3"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let r2 = write(
        dir.path(),
        "r2.json",
        r#"{"dim":3,"amplitudes":[[0.6,0],[0.8,0],[0,0]]}"#,
    );
    let v = stdout_json(&cohlab(&["convert", &r2]));
    assert!(v["conversion"]["k_values"]["2"].as_f64().unwrap() > 1e-7);
    assert!(v["conversion"]["k_values"]["3"].as_f64().unwrap() <= 1e-7);
    assert_eq!(v["ok"], true);

    let b = write(
        dir.path(),
        "b.json",
        r#"{"dim":3,"amplitudes":[[0,0],[0,0],[1,0]]}"#,
    );
    let v = stdout_json(&cohlab(&["convert", &b]));
    for k in ["2", "3"] {
        assert_eq!(v["conversion"]["k_values"][k].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn verify_exit_codes() {
    let out = cohlab(&["verify", "cauchy-binet", "--cases", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["results"].as_array().unwrap().len(), 1000);
    assert!(v["results"][0]["residual"].is_number());

    assert_eq!(
        cohlab(&["verify", "maclaurin", "--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cohlab(&["verify", "maclaurin", "--tol", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        cohlab(&["verify", "maclaurin", "--cases", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cohlab(&["verify", "no-such-suite"]).status.code(), Some(2));
}

#[test]
fn verify_reports_failure_with_exit_one() {
    let out = cohlab(&[
        "verify",
        "grover-consistency",
        "--cases",
        "5",
        "--tol",
        "1e-300",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["passed"], false);
}

#[test]
fn outputs_are_reproducible_and_atomic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = cohlab(&[
            "verify",
            "theorem2",
            "--cases",
            "8",
            "--seed",
            "3",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 2);

    let c = dir.path().join("c.csv");
    let d = dir.path().join("d.csv");
    cohlab(&["grover", "1024", "5", "10", "--out", c.to_str().unwrap()]);
    cohlab(&["grover", "1024", "5", "10", "--out", d.to_str().unwrap()]);
    assert_eq!(std::fs::read(&c).unwrap(), std::fs::read(&d).unwrap());
}

#[test]
fn thread_cap_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_cohlab"))
        .args(["verify", "lemma1", "--cases", "10"])
        .env("COHLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_cohlab"))
        .args(["verify", "lemma1", "--cases", "10"])
        .env("COHLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn csv_rejected_for_json_commands() {
    assert_eq!(
        cohlab(&["verify", "maclaurin", "--format", "csv"])
            .status
            .code(),
        Some(2)
    );
}
