use std::fs;
use std::path::PathBuf;
use std::process::Command;

use sa2_cli::io::{parse_lossless, print_lossless};
use sa2_cli::run_cli_with_env;
use sa2_core::oracle::OracleReport;
use sa2_core::pipeline::{Decision, IdentityDecision};
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_env(args, None)
}

fn run_env(args: &[&str], env: Option<&str>) -> (i32, String, String) {
    let mut argv = vec!["sa2"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli_with_env(&argv, env.map(String::from), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const TRIVIAL: &str = r#"{"generators": [{"A": [[1,0],[0,1]], "a": [1,0]}, {"A": [[1,0],[0,1]], "a": [-1,0]}]}"#;
const SHEAR: &str = r#"{"generators": [{"A": [[1,1],[0,1]], "a": [0,0]}]}"#;
const INVERSE_PAIR: &str = r#"{"generators": [{"A": [[2,1],[1,1]], "a": [0,0]}, {"A": [[1,-1],[-1,2]], "a": [0,0]}]}"#;
const ONE_SIDED: &str = r#"{"generators": [{"A": [[2,1],[1,1]], "a": [1,0]}, {"A": [[1,-1],[-1,2]], "a": [0,0]}]}"#;

#[test]
fn decide_group_examples() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "t.json", TRIVIAL);
    let (code, out, _) = run(&["decide-group", t.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("case: trivial"), "{out}");
    assert!(out.contains("certificate: [[1,1],[2,1]]") || out.contains("certificate: [[2,1],[1,1]]"), "{out}");

    let u = write(&dir, "u.json", SHEAR);
    assert_eq!(run(&["decide-group", u.to_str().unwrap()]).0, 1);

    let bad = write(&dir, "bad.json", "{\"generators\": [");
    let (code, _, err) = run(&["decide-group", bad.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("malformed JSON"));

    let det = write(&dir, "det.json", r#"{"generators": [{"A": [[2,0],[0,1]], "a": [0,0]}]}"#);
    let (code, _, err) = run(&["decide-group", det.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("determinant"));
}

#[test]
fn json_decisions_round_trip() {
    let dir = TempDir::new().unwrap();
    for body in [TRIVIAL, SHEAR, INVERSE_PAIR, ONE_SIDED] {
        let f = write(&dir, "x.json", body);
        let (code, out, _) = run(&["--json", "decide-group", f.to_str().unwrap()]);
        let d: Decision = parse_lossless(&out).unwrap();
        assert_eq!(d.exit_code(), code);
        assert_eq!(parse_lossless::<Decision>(&print_lossless(&d)).unwrap(), d);
        let (code, out, _) = run(&["decide-identity", "--json", f.to_str().unwrap()]);
        let d: IdentityDecision = parse_lossless(&out).unwrap();
        assert_eq!(d.exit_code(), code);
    }
}

#[test]
fn big_exponents_are_strings() {
    let w = sa2_core::witness::PowerWord::new(vec![(1, 1u64 << 60), (2, 3)]).unwrap();
    let d = Decision::IsGroup { certificate: Some(w), case: "positive-scale".into() };
    let text = print_lossless(&d);
    assert!(text.contains(&format!("\"{}\"", 1u64 << 60)));
    assert_eq!(parse_lossless::<Decision>(&text).unwrap(), d);
}

#[test]
fn identity_subsets() {
    let dir = TempDir::new().unwrap();
    let body = r#"{"generators": [{"A": [[1,1],[0,1]], "a": [0,0]}, {"A": [[1,0],[0,1]], "a": [0,0]}]}"#;
    let f = write(&dir, "i.json", body);
    let (code, out, _) = run(&["decide-identity", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("subset: [2]"), "{out}");
    let u = write(&dir, "u.json", SHEAR);
    assert_eq!(run(&["decide-identity", u.to_str().unwrap()]).0, 1);
}

#[test]
fn classify_and_verify() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p.json", INVERSE_PAIR);
    let (code, out, _) = run(&["classify", "--json", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["generators"][0]["class"], "positive-scale");
    assert_eq!(v["group_case"], "positive-scale");
    assert_eq!(run(&["verify", f.to_str().unwrap(), "[[1,1],[2,1]]"]).0, 0);
    assert_eq!(run(&["verify", f.to_str().unwrap(), "[[1,2],[2,1]]"]).0, 1);
    assert_eq!(run(&["verify", f.to_str().unwrap(), "[[1,1]]"]).0, 1);
    assert_eq!(run(&["verify", f.to_str().unwrap(), "[[0,1]]"]).0, 3);
    let c = write(&dir, "cert.json", r#"{"certificate": [[2,1],[1,1]]}"#);
    assert_eq!(run(&["verify", f.to_str().unwrap(), c.to_str().unwrap()]).0, 0);
}

#[test]
fn oracle_report_json() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.json", TRIVIAL);
    let (code, out, _) = run(&["oracle", "--caps-depth", "3", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r: OracleReport = parse_lossless(&out).unwrap();
    assert!(r.full_image_identity_found);
    assert_eq!(r.caps.depth, 3);
}

#[test]
fn caps_precedence() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.json", &TRIVIAL.replace("]}", "], \"caps\": {\"depth\": 4}}"));
    let report = |args: &[&str], env: Option<&str>| -> OracleReport {
        let (code, out, err) = run_env(args, env);
        assert_eq!(code, 0, "{err}");
        parse_lossless(&out).unwrap()
    };
    let p = f.to_str().unwrap();
    let r = report(&["oracle", p], Some(r#"{"depth": 5, "norm": 99}"#));
    assert_eq!((r.caps.depth, r.caps.norm), (4, 99));
    let r = report(&["oracle", "--caps-depth", "2", "--caps-norm", "7", p], Some(r#"{"depth": 5}"#));
    assert_eq!((r.caps.depth, r.caps.norm), (2, 7));
    assert_eq!(run_env(&["oracle", p], Some("{\"nope\": 1}")).0, 3);
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(run(&[]).0, 3);
    assert_eq!(run(&["frobnicate"]).0, 3);
    assert_eq!(run(&["decide-group", "/nonexistent/file.json"]).0, 3);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn corpus_summary() {
    let (code, out, _) = run(&["corpus", "--seed", "3", "--count", "16", "--json"]);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["instances"], 16);
    assert_eq!(v["contradictions"], 0);
}

#[test]
fn render_cells() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p.json", INVERSE_PAIR);
    let svg = dir.path().join("cells.svg");
    assert_eq!(run(&["render-cells", f.to_str().unwrap(), "--output", svg.to_str().unwrap()]).0, 0);
    let doc = fs::read_to_string(&svg).unwrap();
    assert!(doc.starts_with("<?xml") && doc.contains("<svg") && doc.contains(">d12</text>"));
    assert!(doc.contains(r#"cx="240.000" cy="240.000""#));

    let u = write(&dir, "u.json", SHEAR);
    let none = dir.path().join("none.svg");
    let (code, _, err) = run(&["render-cells", u.to_str().unwrap(), "-o", none.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("not a positive-scale"));
    assert!(!none.exists());
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bin = env!("CARGO_BIN_EXE_sa2");
    let t = write(&dir, "t.json", TRIVIAL);
    let s = Command::new(bin).args(["decide-group", t.to_str().unwrap()]).status().unwrap();
    assert_eq!(s.code(), Some(0));
    let u = write(&dir, "u.json", SHEAR);
    let s = Command::new(bin).args(["decide-group", u.to_str().unwrap()]).status().unwrap();
    assert_eq!(s.code(), Some(1));
    // without the closed forms this shear instance stays open
    let h = write(&dir, "h.json", r#"{"generators": [{"A": [[1,1],[0,1]], "a": [1,0]}, {"A": [[1,-1],[0,1]], "a": [0,0]}]}"#);
    let o = Command::new(bin)
        .args(["decide-group", h.to_str().unwrap()])
        .env("SA2_DECIDE_CAPS", r#"{"h3_closed_form": false}"#)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stdout));
    let s = Command::new(bin).args(["decide-group", "--caps-depth", "x", t.to_str().unwrap()]).status().unwrap();
    assert_eq!(s.code(), Some(3));
}
