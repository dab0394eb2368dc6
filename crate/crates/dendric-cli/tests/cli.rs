use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dendric")).args(args).env_remove("DENDRIC_HORIZON").output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, serde_json::Value) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (out.status.code().unwrap(), v)
}

#[test]
fn audit_tribonacci() {
    let trib = data("trib.ds");
    let (code, v) = json(&["audit", "--ds", trib.to_str().unwrap(), "--horizon", "30"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["passed"], true);
    let table = v["complexity"].as_array().unwrap();
    assert_eq!(table.len(), 31);
    assert!(table.iter().all(|r| r["p"] == r["expected"]));
    assert_eq!(table[30]["p"], 61);
}

#[test]
fn horizon_from_environment() {
    let trib = data("trib.ds");
    let out = Command::new(env!("CARGO_BIN_EXE_dendric"))
        .args(["--format", "json", "gen", "--ds", trib.to_str().unwrap()])
        .env("DENDRIC_HORIZON", "5")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["horizon"], 5);
    assert_eq!(v["lengths"][4]["count"], 11);
}

#[test]
fn classify_and_derive() {
    let trib = data("trib.ds");
    let (code, v) = json(&["classify", "--ds", trib.to_str().unwrap(), "--horizon", "20"]);
    assert_eq!(code, 0);
    assert_eq!(v["class"], "[0,0]");
    let (code, v) = json(&["derive", "--ds", trib.to_str().unwrap(), "--horizon", "40", "--steps", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["steps"].as_array().unwrap().len(), 2);
    assert_eq!(v["steps"][0]["template"], "a");
}

#[test]
fn derive_reports_missing_horizon() {
    let trib = data("trib.ds");
    let (code, v) = json(&["derive", "--ds", trib.to_str().unwrap(), "--horizon", "12", "--steps", "4"]);
    assert_eq!(code, 2);
    assert!(v["undecided_at"].as_u64().unwrap() >= 2);
}

#[test]
fn graph_verdicts() {
    let path = data("iet_path.ds");
    let (code, v) = json(&["graph", "check", "--graph", "Giet", "--seq", path.to_str().unwrap(), "--len", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["accepted"], true);
    assert_eq!(v["witness"]["vertices"][3], "[3,3]");
    let trib = data("trib.ds");
    let (code, v) = json(&["graph", "check", "--graph", "Giet", "--seq", trib.to_str().unwrap(), "--len", "6"]);
    assert_eq!(code, 1);
    assert_eq!(v["accepted"], false);
}

#[test]
fn iet_expand_stops_at_connection() {
    let (code, v) = json(&["iet", "expand", "--lambda", "5/9,3/9,1/9", "--perm", "123/231", "--depth", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["steps"][0]["label"], "a");
    assert_eq!(v["steps"][0]["lambda"][0], "1/9");
    assert_eq!(v["connection"], 2);
}

#[test]
fn iet_code_lists_factors() {
    let (code, v) = json(&["iet", "code", "--lambda", "1/2,1/3,1/6", "--len", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["lengths"][0]["count"], 3);
}

#[test]
fn cassaigne_commands() {
    let (code, v) = json(&["cassaigne", "check", "--max-len", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["words_checked"], 42);
    assert_eq!(v["counterexamples"].as_array().unwrap().len(), 0);
    let (code, v) = json(&["cassaigne", "check", "--seq", "1212"]);
    assert_eq!(code, 0);
    assert_eq!(v["products"][0], "c121");
    assert_eq!(v["remainder"], "2");
    assert_eq!(v["recomposed"], true);
}

#[test]
fn output_is_deterministic() {
    let a = run(&["--format", "json", "cassaigne", "check", "--max-len", "2"]);
    let b = run(&["--format", "json", "cassaigne", "check", "--max-len", "2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(64));
    assert_eq!(run(&["iet", "code", "--lambda", "x,y,z"]).status.code(), Some(64));
    assert_eq!(run(&["audit", "--ds", "/nonexistent.ds"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
