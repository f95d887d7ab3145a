//! End-to-end runs of the `ysys` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn ysys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ysys")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ysys-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn cf_json_has_table_keys() {
    let out = ysys(&["cf", "--n", "6,4,3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["n", "p", "q", "r", "A_F"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["n"], serde_json::json!([6, 4, 3]));
}

#[test]
fn rejected_input_exits_2() {
    assert_eq!(ysys(&["cf", "--n", "2"]).status.code(), Some(2));
    assert_eq!(ysys(&["cf", "--n", "0,3"]).status.code(), Some(2));
    assert_eq!(ysys(&["cf", "--n", "6", "--bogus"]).status.code(), Some(2));
    assert_eq!(ysys(&["verify", "ysystem", "--n", "6", "--window", "1..9"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_1() {
    let out = ysys(&["verify", "periodicity", "--n", "6", "--window", "0..5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("check failed"));
}

#[test]
fn verify_passes() {
    for what in ["schedule", "ysystem", "tsystem", "periodicity", "dilog", "crossratio"] {
        let out = ysys(&["verify", what, "--n", "6,4", "--seeds", "1"]);
        assert_eq!(out.status.code(), Some(0), "{what}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn svg_is_byte_stable_and_titled() {
    let a = scratch("a.svg");
    let b = scratch("b.svg");
    for p in [&a, &b] {
        let out = ysys(&["triangulate", "--system", "rsg", "--n", "6,4", "--svg", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.contains("Initial triangulation of 31-gon"));
}

#[test]
fn run_output_is_byte_stable() {
    let run = |seed: &str, flag: &str, name: &str| {
        let p = scratch(name);
        let out = ysys(&["run", "--system", "sg", "--n", "6", "--seed", seed, flag, p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("7", "--json", "a.json"), run("7", "--json", "b.json"));
    let dump = run("7", "--dump", "a.dump");
    assert_eq!(dump, run("7", "--dump", "b.dump"));
    assert_ne!(dump, run("8", "--dump", "c.dump"));
    let v: serde_json::Value = serde_json::from_slice(&dump).unwrap();
    assert!(v["values"].as_object().unwrap().contains_key("Y(1,1)(+00001)"));
}
