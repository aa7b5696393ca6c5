use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supcalc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn eval_chain_at_zero() {
    let o = run(&["eval", "--instance", &fixture("chain.json"), "--point", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["f"], "0");
    assert_eq!(v["active"].as_array().unwrap().len(), 10);
    let o = run(&["eval", "--instance", &fixture("chain.json"), "--point", "1,2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json_lines(&o)[0]["error"], "dimension-mismatch");
}

#[test]
fn eval_outside_domains() {
    let o = run(&["eval", "--instance", &fixture("opposing_half_lines.json"), "--point", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["f"], "+inf");
    assert_eq!(v["members"]["left"], "+inf");
    assert_eq!(v["members"]["right"], "0");
    assert!(v["active"].is_null());
}

#[test]
fn verify_reports() {
    let o = run(&["verify", "--instance", &fixture("plus_minus.json"), "--identity", "L2A"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["status"], "pass");

    let o = run(&["verify", "--instance", &fixture("chain.json"), "--identity", "T44", "--point", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json_lines(&o)[0];
    assert_eq!(r["status"], "pass");
    assert!(r["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("closure: 2 vertices")));

    let o = run(&["verify", "--instance", &fixture("opposing_half_lines.json"), "--identity", "T53", "--point", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o)[0]["status"], "hypotheses-not-met");
}

#[test]
fn verify_unknown_identity() {
    let o = run(&["verify", "--instance", &fixture("plus_minus.json"), "--identity", "Z9"]);
    assert_eq!(o.status.code(), Some(2));
    let v = &json_lines(&o)[0];
    assert_eq!(v["error"], "unknown-identity");
    assert!(v["valid"].as_array().unwrap().iter().any(|i| i == "T53"));
}

#[test]
fn schema_rejection() {
    let dir = std::env::temp_dir().join("supcalc-cli-schema");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"version": 1, "dim": 1, "functions": [], "colour": "red"}"#).unwrap();
    let o = run(&["eval", "--instance", path.to_str().unwrap(), "--point", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json_lines(&o)[0]["error"], "schema");
}

#[test]
fn fuzz_runs_and_is_reproducible() {
    let args = ["fuzz", "--seed", "42", "--count", "4", "--identity", "L2A,P34,T53"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_lines(&a).len(), 4 * 3 * 2);
    let summary = String::from_utf8(a.stderr).unwrap();
    assert!(summary.contains("T53"));
}

#[test]
fn fuzz_count_cap() {
    let o = run(&["fuzz", "--seed", "1", "--count", "1000000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn plots() {
    let dir = std::env::temp_dir().join("supcalc-cli-plots");
    std::fs::create_dir_all(&dir).unwrap();
    let conj = dir.join("conj.svg");
    let pm = fixture("plus_minus.json");
    let o = run(&["plot", "--instance", &pm, "--what", "conjugate", "--out", conj.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let first = std::fs::read(&conj).unwrap();
    run(&["plot", "--instance", &pm, "--what", "conjugate", "--out", conj.to_str().unwrap()]);
    assert_eq!(first, std::fs::read(&conj).unwrap());
    let sub = dir.join("sub.svg");
    let o = run(&["plot", "--instance", &pm, "--what", "subdiff", "--point", "0", "--eps", "1/2", "--out", sub.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(std::fs::read(&sub).unwrap()).unwrap().contains("<line"));
    let o = run(&["plot", "--instance", &pm, "--what", "function"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identities_listing() {
    let o = run(&["identities"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 18);
}
