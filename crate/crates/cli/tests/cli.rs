use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_s3modes"))
        .args(args)
        .env("S3MODES_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn lens_multiplicity_table() {
    let v = json(&["multiplicity", "--space", "lens:5,1", "--k-max", "10"]);
    assert_eq!(v["schema"], 1);
    let table = v["table"].as_array().unwrap();
    assert_eq!(table.len(), 11);
    assert!(table.iter().any(|row| row["k"] == 2 && row["value"] == 3));
    assert_eq!(table[0]["value"], 1);
}

#[test]
fn prism_multiplicity_single_level() {
    let v = json(&["multiplicity", "--space", "prism:2", "--k", "4"]);
    assert_eq!(v["table"][0]["value"], 10);
    let out = run(&["multiplicity", "--space", "prism:2", "--k", "2", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "k,multiplicity,method,quoted_formula,flagged\n2,0,prism-counting,3,true\n");
}

#[test]
fn verify_all_suites_passes() {
    let out = run(&["verify", "--k", "4", "--suite", "all"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["tolerances"]["rotation"], 1e-8);
    let suites: std::collections::BTreeSet<_> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["suite"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(suites.len(), 5);
}

#[test]
fn verify_breach_exits_one() {
    let out = run(&["verify", "--k", "2", "--suite", "bases", "--tol-gram", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn validation_errors_exit_two() {
    for args in [
        &["multiplicity", "--space", "lens:4,2", "--k", "2"][..],
        &["basis-matrix", "--k", "3"],
        &["rotate", "--k", "2", "--rotation", "1,0,0,0,1,0,0"],
        &["verify", "--k", "3"],
        &["verify", "--suite", "nonsense"],
        &["eval", "--basis", "b2", "--k", "2", "--point", "3,0,0"],
        &["multiplicity", "--k", "2"],
        &["rotate", "--k", "2", "--bogus-flag"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn basis_matrix_json_and_csv() {
    let v = json(&["basis-matrix", "--k", "2"]);
    assert_eq!(v["shape"], serde_json::json!([9, 9]));
    assert_eq!(v["from"], "B3");
    assert_eq!(v["to"], "B2");
    // row (0,0) sits at index 4 and is constant 1/9
    let e = &v["entries"][4 * 9];
    assert!((e[0].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-15);
    let out = run(&["basis-matrix", "--k", "2", "--direction", "phi-from-t", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 82);
    assert!(text.starts_with("row,col,re,im\n0,0,"));
}

#[test]
fn rotate_lens_generator_in_b2_frame_is_diagonal() {
    let v = json(&["rotate", "--k", "2", "--space", "lens:3,1", "--frame", "b2"]);
    let entries = v["entries"].as_array().unwrap();
    for (idx, e) in entries.iter().enumerate() {
        let (r, c) = (idx / 9, idx % 9);
        let norm = e[0].as_f64().unwrap().hypot(e[1].as_f64().unwrap());
        if r == c {
            assert!((norm - 1.0).abs() < 1e-8);
        } else {
            assert!(norm < 1e-8);
        }
    }
}

#[test]
fn rotate_normalize_and_oracle() {
    let out = run(&["rotate", "--k", "2", "--rotation", "1,1,0,0,1,0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    let closed = json(&["rotate", "--k", "2", "--rotation", "1,1,0,0,1,0,0,0", "--normalize"]);
    let oracle = json(&["rotate", "--k", "2", "--rotation", "1,1,0,0,1,0,0,0", "--normalize", "--method", "oracle"]);
    assert!(oracle["oracle_residual"].as_f64().unwrap() < 1e-10);
    let a = closed["entries"].as_array().unwrap();
    let b = oracle["entries"].as_array().unwrap();
    for (x, y) in a.iter().zip(b) {
        for t in 0..2 {
            assert!((x[t].as_f64().unwrap() - y[t].as_f64().unwrap()).abs() < 1e-8);
        }
    }
}

#[test]
fn invariants_from_group_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("group.json");
    std::fs::write(
        &path,
        r#"{"generators": [
            {"q_left": [0, 0, 0, 1], "q_right": [1, 0, 0, 0]},
            {"q_left": [0, -1, 0, 0], "q_right": [1, 0, 0, 0]}
        ]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["invariants", "--group-file", p, "--k", "4"]);
    assert_eq!(v["dimension"], 10);
    assert_eq!(v["basis_b3"].as_array().unwrap().len(), 10);
    assert_eq!(v["basis_b2"][0].as_array().unwrap().len(), 25);
    assert!(v["invariance_defect"].as_f64().unwrap() < 1e-8);
    let m = json(&["multiplicity", "--group-file", p, "--k", "4"]);
    assert_eq!(m["table"][0]["value"], 10);
    assert_eq!(m["table"][0]["method"], "projector-rank");
}

#[test]
fn out_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = run(&["invariants", "--space", "prism:3", "--k", "6", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
}

#[test]
fn eval_both_bases() {
    let v = json(&["eval", "--basis", "b2", "--k", "0", "--point", "0.1,0.2,0.3"]);
    let val = v["values"][0]["value"][0].as_f64().unwrap();
    assert!((val - 1.0 / std::f64::consts::PI).abs() < 1e-15);
    let v = json(&["eval", "--basis", "b3", "--k", "2", "--point", "0,0,0"]);
    assert_eq!(v["values"].as_array().unwrap().len(), 9);
    let out = run(&["eval", "--basis", "b3", "--k", "2", "--i", "1", "--j", "0", "--point", "0,0,0", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("I,J,chi,theta,phi,re,im\n1.0,0.0,0.0,0.0,0.0,"));
}

#[test]
fn thread_variable_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_s3modes"))
        .args(["multiplicity", "--space", "lens:3,1", "--k", "2"])
        .env("S3MODES_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
