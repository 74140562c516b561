use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pfa-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn pfa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfa"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = pfa(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(args: &[&str]) -> Value {
    serde_json::from_slice(&ok(args).stdout).unwrap()
}

fn read(path: &PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn strict15_then_search_finds_the_solution() {
    let out = scratch("s15.json");
    let o = out.to_str().unwrap();
    ok(&[
        "compile",
        "pcp2pfa",
        "--construction",
        "strict15",
        "--in",
        &fixture("classic_antizero.json"),
        "--out",
        o,
    ]);
    let manifest = read(&out.with_extension("manifest.json"));
    assert_eq!(manifest["summary"]["states"], 15);
    assert_eq!(manifest["construction"], "strict15");
    let rep = json(&["search", "--pfa", o, "--max-len", "6"]);
    assert_eq!(rep["witness"]["word"], serde_json::json!(["1", "3", "2", "3"]));
}

#[test]
fn every_pcp_construction_compiles() {
    let plain = fixture("classic_antizero.json");
    let rm = fixture("rmpcp.json");
    for (c, inst, states) in [
        ("eq13", &plain, 13),
        ("eq11", &plain, 11),
        ("strict15", &plain, 15),
        ("strict13", &plain, 13),
        ("rmpcp12", &rm, 12),
        ("nine9", &plain, 9),
        ("out18", &plain, 18),
        ("minf11", &rm, 11),
        ("bin2", &plain, 26),
    ] {
        let p = json(&["compile", "pcp2pfa", "--construction", c, "--in", inst]);
        assert_eq!(p["pi"].as_array().unwrap().len(), states, "{c}");
    }
}

#[test]
fn rmpcp_construction_rejects_a_plain_instance() {
    let out = pfa(&[
        "compile",
        "pcp2pfa",
        "--construction",
        "rmpcp12",
        "--in",
        &fixture("classic.json"),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("pcp2pfa::rmpcp12"));
}

#[test]
fn unknown_construction_is_refused() {
    let out = pfa(&[
        "compile",
        "pcp2pfa",
        "--construction",
        "eq99",
        "--in",
        &fixture("classic.json"),
    ]);
    assert!(!out.status.success());
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args = ["compile", "int2pfa", "--in", &fixture("classic.json")];
    let (a, b) = (pfa(&args), pfa(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn solve_pcp_classic() {
    let s = json(&["solve-pcp", "--in", &fixture("classic.json")]);
    assert_eq!(s["solution"], serde_json::json!([3, 2, 3, 1]));
}

#[test]
fn verify_commands_pass() {
    for what in ["laws", "paper-matrices", "identities"] {
        let v = json(&["verify", what, "--seed", "3", "--cases", "50"]);
        assert_eq!(v["pass"], true, "{what}");
    }
}

#[test]
fn tm2mpcp_pair_count_and_code() {
    let out = scratch("tm.json");
    ok(&[
        "compile",
        "tm2mpcp",
        "--machine",
        &fixture("write_and_halt.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    let m = read(&out.with_extension("manifest.json"));
    assert_eq!(m["pairs"], m["pair_count_formula"]);
    let e = json(&[
        "encode-tm",
        "--machine",
        &fixture("write_and_halt.json"),
        "--target",
        "p12",
    ]);
    assert_eq!(e["code"]["#"], "101");
    assert_eq!(e["pfa"]["pi"].as_array().unwrap().len(), 12);
}

#[test]
fn int2pfa_routes() {
    let c = json(&["compile", "int2pfa", "--in", &fixture("classic.json")]);
    assert_eq!(c["pi"].as_array().unwrap().len(), 9);
    let h = json(&[
        "compile",
        "int2pfa",
        "--in",
        &fixture("toy_2mpcp.json"),
        "--route",
        "hirvensalo20",
    ]);
    assert_eq!(h["alphabet"], serde_json::json!(["a", "b"]));
}

#[test]
fn checker_scores_a_machine_run() {
    let out = scratch("ec.json");
    ok(&[
        "compile",
        "cl2cm-checker",
        "--g",
        "4",
        "--machine",
        &fixture("up_down.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    let m = read(&out.with_extension("manifest.json"));
    assert_eq!(m["summary"]["states"], 132);
    assert_eq!(m["run"]["correct"], m["run"]["incorrect"]);
    assert_eq!(m["run"]["limit_accept"], "1023/1024");
}

#[test]
fn amplification_commands() {
    let out = scratch("af.json");
    ok(&[
        "compile",
        "amplify-f",
        "--pfa",
        &fixture("always.json"),
        "--x",
        "1",
        "--eps",
        "1/100",
        "--out",
        out.to_str().unwrap(),
    ]);
    let m = read(&out.with_extension("manifest.json"));
    assert_eq!(m["summary"]["states"], 7);
    let nc = json(&["compile", "amplify-nc", "--pfa", &fixture("always.json")]);
    assert_eq!(nc["pi"].as_array().unwrap().len(), 9);
    let go = scratch("go.json");
    ok(&[
        "compile",
        "amplify-go",
        "--x",
        "3/4",
        "--eps",
        "1/4",
        "--out",
        go.to_str().unwrap(),
    ]);
    let g = read(&go.with_extension("manifest.json"));
    assert_eq!(g["sound"], true);
    assert_eq!(
        (g["plan"]["n"].as_u64(), g["plan"]["t"].as_u64()),
        (Some(3), Some(4))
    );
}
