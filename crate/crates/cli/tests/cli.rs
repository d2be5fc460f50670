use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bsgkit"));
    c.env_remove("BSGKIT_CAPS");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bsgkit-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    let o = run(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn gen_writes_identical_files() {
    let dir = scratch("gen");
    let a = gen(&dir, "a.json", &["--family", "complete", "--r", "2", "--n", "4", "--seed", "1"]);
    let b = gen(&dir, "b.json", &["--family", "complete", "--r", "2", "--n", "4", "--seed", "1"]);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn extract_complete_passes() {
    let dir = scratch("extract");
    let inst = gen(&dir, "i.json", &["--family", "complete", "--r", "2", "--n", "4", "--seed", "1"]);
    let o = run(&["extract", "--instance", &inst, "--mode", "general", "--K", "1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["report"]["overall"], Value::Bool(true));
    assert!(v["report"]["inequalities"].as_array().unwrap().iter().all(|i| i["pass"] == Value::Bool(true)));
    assert_eq!(v["result"]["subsets"][0].as_array().unwrap().len(), 4);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&run(&["extract", "--instance", "x.json", "--bogus"])), 64);
    assert_eq!(code(&run(&["extract", "--instance", "x.json", "--K", "0.5"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn runtime_errors_exit_1() {
    assert_eq!(code(&run(&["measure", "--instance", "/nonexistent/i.json"])), 1);
    let dir = scratch("errors");
    let inst = gen(&dir, "i.json", &["--family", "complete", "--n", "3"]);
    let o = bin().args(["measure", "--instance", &inst]).env("BSGKIT_CAPS", "bogus=1").output().unwrap();
    assert_eq!(code(&o), 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn count_matches_k33() {
    let dir = scratch("count");
    let inst = gen(&dir, "i.json", &["--family", "complete", "--n", "3"]);
    let full = json(&run(&["count", "--instance", &inst, "--support", "0,1", "--exact", "full"]));
    assert_eq!((full["relaxed"].as_str(), full["exact"].as_str()), (Some("6"), Some("4")));
    let named = json(&run(&["count", "--instance", &inst, "--support", "0,1", "--exact", "named-only"]));
    assert_eq!(named["exact"].as_str(), Some("6"));
}

#[test]
fn verify_round_trip_and_mode_mismatch() {
    let dir = scratch("verify");
    let inst = gen(&dir, "i.json", &["--family", "planted", "--n", "12", "--seed", "7", "--ap-fraction", "1"]);
    let out = dir.join("e.json").to_string_lossy().into_owned();
    assert_eq!(code(&run(&["extract", "--instance", &inst, "--out", &out])), 0);
    assert_eq!(code(&run(&["verify", "--instance", &inst, "--result", &out, "--mode", "general"])), 0);
    assert_eq!(code(&run(&["verify", "--instance", &inst, "--result", &out, "--mode", "dense"])), 1);
    let csv = run(&["report", "--input", &out, "--csv"]);
    assert!(String::from_utf8_lossy(&csv.stdout).starts_with("name,relation,pass"));
}

#[test]
fn workers_do_not_change_bytes() {
    let dir = scratch("workers");
    let inst = gen(&dir, "i.json", &["--family", "random-density", "--K", "2", "--sizes", "5,6,7", "--seed", "3"]);
    let one = run(&["extract", "--instance", &inst, "--workers", "1", "--random-pivots", "4"]);
    let four = run(&["extract", "--instance", &inst, "--workers", "4", "--random-pivots", "4"]);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(code(&one), code(&four));
}

#[test]
fn failing_bound_exits_2_with_output() {
    // The last-part vertex kept by the degree cut has a single neighbour,
    // so its supports carry no octopus.
    let dir = scratch("fail");
    let inst = gen(&dir, "i.json", &["--family", "random-density", "--K", "2", "--r", "2", "--n", "7", "--seed", "101"]);
    let out = dir.join("e.json").to_string_lossy().into_owned();
    let o = run(&["extract", "--instance", &inst, "--K", "2", "--out", &out]);
    assert_eq!(code(&o), 2);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["report"]["overall"], Value::Bool(false));
    assert!(String::from_utf8_lossy(&o.stderr).contains("octopus count lower bound"));
}

#[test]
fn every_family_round_trips() {
    let dir = scratch("families");
    let cases: [(&str, &[&str]); 4] = [
        ("complete", &["--family", "complete", "--r", "3", "--n", "5"]),
        ("planted", &["--family", "planted", "--n", "10", "--group", "23"]),
        ("dense", &["--family", "dense", "--r", "2", "--n", "10", "--delta", "1/500"]),
        ("random", &["--family", "random-density", "--K", "3/2", "--n", "9", "--seed", "2"]),
    ];
    for (name, args) in cases {
        let inst = gen(&dir, &format!("{name}.json"), args);
        assert_eq!(code(&run(&["measure", "--instance", &inst])), 0);
        let out = dir.join(format!("{name}-e.json")).to_string_lossy().into_owned();
        let o = run(&["extract", "--instance", &inst, "--out", &out]);
        assert!(matches!(code(&o), 0 | 2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let v = run(&["verify", "--instance", &inst, "--result", &out, "--mode", "general"]);
        assert_eq!(code(&v), code(&o), "{name}");
    }
    let dense = dir.join("dense.json").to_string_lossy().into_owned();
    let o = run(&["extract", "--instance", &dense, "--mode", "almost-all", "--eps", "1/25"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn energy_and_sumset() {
    let dir = scratch("sets");
    let set = dir.join("s.json");
    std::fs::write(&set, r#"{"group":{"moduli":[0]},"elements":[[0],[1],[2]]}"#).unwrap();
    let set = set.to_string_lossy().into_owned();
    let e = json(&run(&["energy", "--set", &set]));
    assert_eq!((e["energy"].as_str(), e["doubling"].as_str(), e["size"].as_u64()), (Some("19"), Some("5/3"), Some(3)));
    let s = json(&run(&["sumset", "--set", &set, "--set", &set, "--set", &set]));
    assert_eq!(s["sumset_size"].as_u64(), Some(7));
}
