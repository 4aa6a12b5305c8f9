use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dieudonne"))
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("DIEUDONNE_FIELD_TABLE").output().unwrap()
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn documented_examples() {
    assert_eq!(run_json(&["a-number", "--module", &fixture("m2.json")]), json!({"a": 1}));
    assert_eq!(run_json(&["slopes", "--poly", "F^2-p", "-p", "2", "-n", "8"]), json!({"slopes": [["1/2", 2]]}));
    let c = run_json(&["count-ss", "-p", "11"]);
    assert_eq!(c["count"], json!(2));
    assert_eq!(c["mass"], json!("5/12"));
}

#[test]
fn module_commands() {
    assert_eq!(run_json(&["a-number", "--module", &fixture("m1.json")]), json!({"a": 0}));
    assert_eq!(run_json(&["classify-rank2", "--module", &fixture("m1.json")]), json!({"class": "M1"}));
    assert_eq!(run_json(&["classify-rank2", "--module", &fixture("m2.json")]), json!({"class": "M2"}));
    assert_eq!(run_json(&["slopes", "--matrix", &fixture("m1.json")]), json!({"slopes": [["0", 1], ["1", 1]]}));
    // the dual re-parses and feeds back in through stdin
    let d = run(&["dual", "--module", &fixture("m2.json")]);
    let again = run_stdin(&["a-number", "--module", "-"], &d.stdout);
    assert_eq!(serde_json::from_slice::<Value>(&again.stdout).unwrap(), json!({"a": 1}));
}

#[test]
fn emitted_objects_round_trip() {
    let tower = dieudonne::fields::Tower::default();
    let v: Value = serde_json::from_slice(&run(&["dual", "--module", &fixture("m2.json")]).stdout).unwrap();
    let m = dieudonne::json::module_from(&tower, &v).unwrap();
    assert_eq!(dieudonne::json::module(&m), v);
    let s = run_json(&["classify-surface", "-p", "2", "-t", "(g:1)", "--lattice", "-n", "4"]);
    let m = dieudonne::json::module_from(&tower, &s["lattice"]).unwrap();
    assert_eq!(dieudonne::json::module(&m), s["lattice"]);
    assert_eq!(s["a_number"], json!(1));
    assert_eq!(s["kind"], json!("case_II"));
}

#[test]
fn polynomial_commands() {
    let d = run_json(&["decompose", "--poly-json", &fixture("poly.json")]);
    assert_eq!(d["summands"], json!([["1/2", 2]]));
    let d = run_json(&["decompose", "--poly", "F^2 - (1+p)*F + p", "-p", "3", "-n", "10"]);
    assert_eq!(d["summands"], json!([["0", 1], ["1", 1]]));
    let d = run_json(&["decompose", "--poly", "F^2 - (1+p)*F + p", "-p", "3", "-n", "10", "--no-split"]);
    assert_eq!(d["blocks"][0]["linear_factors"], Value::Null);
    assert_eq!(run_json(&["invariant", "--slope", "1/3"]), json!({"slope": "1/3", "invariant": "2/3"}));
}

#[test]
fn surface_commands() {
    let m = run_json(&["mobius-check", "-p", "3"]);
    assert_eq!(m["orbit_sizes"], json!([10, 72]));
    let y = run_json(&["y-locus", "-p", "2"]);
    assert_eq!(y["locus"], json!("P1"));
    assert_eq!(y["verification"].as_array().unwrap().len(), 18);
    let c = run_json(&["classify-surface", "-p", "3", "-t", "generic"]);
    assert_eq!((c["kind"].clone(), c["lambda_size"].clone()), (json!("case_I"), json!(2)));
}

#[test]
fn deformation_command() {
    let d = run_json(&["deform", "--base", &fixture("superspecial2.json"), "--d", &fixture("universal.json")]);
    assert_eq!(d["tangent"]["linear_rank"], json!(4));
    assert_eq!(d["tangent"]["cuts_out_origin"], json!(true));
    let d = run_json(&["deform", "--base", &fixture("base1.json"), "--d", &fixture("d_scalar.json")]);
    assert_eq!(d["relations"]["frobenius_rows"][0][0]["eps"], json!([[1]]));
    assert_eq!(d["tangent"]["linear"], json!([[[[1]]]]));
}

#[test]
fn exit_codes() {
    for args in [
        vec!["a-number", "--module", &fixture("truncated.json") as &str],
        vec!["a-number", "--module", "/nonexistent/file.json"],
        vec!["a-number", "--module", &fixture("ragged.json")],
        vec!["slopes", "--poly", "F^2 -", "-p", "2"],
        vec!["slopes", "--poly", "F^2 - p", "-p", "4"],
        vec!["invariant", "--slope", "2/4"],
        vec!["count-ss", "-p", "103"],
        vec!["mobius-check", "-p", "5"],
        vec!["classify-surface", "-p", "3", "-t", "(0:0)"],
        vec!["no-such-command"],
        vec!["--config", &fixture("bad_precision.json"), "a-number", "--module", &fixture("m2.json")],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["slopes", "--poly", "F^2 - p^9", "-p", "2", "-n", "8"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("need at least 9"));
}

#[test]
fn deterministic_and_table_output() {
    let args = ["count-ss", "-p", "13", "--compare-formulas"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let text = String::from_utf8(run(&["--output", "table", "count-ss", "-p", "13"]).stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("count") && l.ends_with('1')));
}

#[test]
fn self_check_passes() {
    let v = run_json(&["self-check", "--trials", "20", "--threads", "3"]);
    assert_eq!(v["passed"], json!(true));
    assert_eq!(v["witt_oracle"].as_array().unwrap().len(), 3);
}
