//! End-to-end runs of the `coorbit` binary on the bundled data files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn coorbit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coorbit"))
        .args(args)
        .env_remove("COORBIT_RADII")
        .env_remove("COORBIT_OUT")
        .env_remove("COORBIT_FLOAT")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn standard_and_toeplitz_differ_in_their_algebras() {
    let (a, b) = (data("standard_d4.json"), data("toeplitz_d4.json"));
    let out = coorbit(&["equivalence", "check", path(&a), path(&b)]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["result"]["result"], "NOT-EQUIVALENT");
    assert_eq!(doc["result"]["reason"], "algebra-invariant-mismatch");
}

#[test]
fn conjugate_pair_is_equivalent_with_a_conjugator() {
    let (a, b) = (data("s1_d4.json"), data("s2_d4.json"));
    let out = coorbit(&["equivalence", "check", path(&a), path(&b)]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["result"]["result"], "EQUIVALENT");
    assert!(doc["result"]["evidence"]["conjugator"].is_array());
}

#[test]
fn alpha_coverings_are_not_weakly_equivalent() {
    let (a, b) = (data("alpha0.json"), data("alpha05.json"));
    let out = coorbit(&["covering", "compare", path(&a), path(&b), "--radii", "64,256,1024"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["result"], "NOT-EQUIVALENT");
}

#[test]
fn reports_are_reproducible_and_embed_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (data("alpha0.json"), data("alpha05.json"));
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = coorbit(&["covering", "compare", path(&a), path(&b), "--radii", "64,256,1024", "--seed", "7", "--out", path(&out)]);
        assert_eq!(o.status.code(), Some(1));
        (std::fs::read(&out).unwrap(), std::fs::read(dir.path().join(name.replace(".json", ".counts.csv"))).unwrap())
    };
    let (r1, c1) = run("one.json");
    let (r2, c2) = run("two.json");
    assert_eq!(r1, r2);
    assert_eq!(c1, c2);
    let doc: serde_json::Value = serde_json::from_slice(&r1).unwrap();
    assert_eq!(doc["config"]["seed"], 7);
    assert_eq!(doc["config"]["radii"], serde_json::json!([64.0, 256.0, 1024.0]));
    assert_eq!(doc["config"]["arithmetic"], "exact-preferred");
}

#[test]
fn group_make_round_trips_through_info() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let o = coorbit(&["group", "make", "toeplitz", "--d", "3", "--delta", "1/4", "--out", path(&g)]);
    assert_eq!(o.status.code(), Some(0));
    let o = coorbit(&["group", "info", path(&g)]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_eq!(doc["result"]["spec"]["d"], 3);
    assert!(doc["result"]["lattice"]["points"].as_u64().unwrap() > 0);
}

#[test]
fn witness_rejects_different_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    coorbit(&["group", "make", "standard", "--lambda", "1/2", "--out", path(&a)]);
    coorbit(&["group", "make", "standard", "--lambda", "1", "--out", path(&b)]);
    let out = dir.path().join("w.json");
    let o = coorbit(&["witness", path(&a), path(&b), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let csv = std::fs::read_to_string(dir.path().join("w.witness.csv")).unwrap();
    assert!(csv.starts_with("n,increment_log10,image_word_lower"));
    assert_eq!(csv.lines().count(), 61);
}

#[test]
fn malformed_input_exits_65() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"d": 3, "kind": "standard", "lambda": ["1/2"]}"#).unwrap();
    let s1 = data("s1_d4.json");
    assert_eq!(coorbit(&["equivalence", "check", path(&bad), path(&s1)]).status.code(), Some(65));
    std::fs::write(&bad, "{").unwrap();
    assert_eq!(coorbit(&["covering", "make", path(&bad)]).status.code(), Some(65));
}

#[test]
fn usage_errors_exit_64_and_missing_files_74() {
    let a = data("alpha0.json");
    assert_eq!(coorbit(&["--frobnicate"]).status.code(), Some(64));
    assert_eq!(coorbit(&["covering", "make", path(&a), "--radii", "9,3"]).status.code(), Some(64));
    assert_eq!(coorbit(&["covering", "make", path(&a), "--radii", "-1"]).status.code(), Some(64));
    assert_eq!(coorbit(&["covering", "make", "/definitely/not/here.json"]).status.code(), Some(74));
    assert_eq!(coorbit(&["--help"]).status.code(), Some(0));
}
