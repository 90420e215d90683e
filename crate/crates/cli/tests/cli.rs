use std::path::Path;
use std::process::Command;

use serde_json::Value;

const SMALL: &str = r#"{
  "semilattices": {
    "two": {"chain": 2},
    "three": {"join": [[0,1,2],[1,1,2],[2,2,2]], "zero": 0}
  },
  "lattices": {
    "c3": {"chain": 3},
    "m3": {"named": "m3"},
    "point": {"chain": 1}
  },
  "homs": {
    "up": {"source": "two", "target": "three", "map": [0, 2]},
    "squash": {"source": "three", "target": "two", "map": [0, 1, 1]}
  },
  "diagrams": {
    "d": {"poset": {"nodes": 2, "covers": [[0, 1]]}, "objects": ["two", "three"], "arrows": [{"from": 0, "to": 1, "hom": "up"}]},
    "collapse": {"poset": {"nodes": 2, "covers": [[0, 1]]}, "objects": ["three", "two"], "arrows": [{"from": 0, "to": 1, "hom": "squash"}]}
  }
}"#;

fn retrolift(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_retrolift"))
        .args(args)
        .current_dir(dir)
        .env_remove("RETROLIFT_BUDGET")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn workspace(text: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ws.json"), text).unwrap();
    dir
}

#[test]
fn clean_workspace_checks_with_exit_zero() {
    let dir = workspace(SMALL);
    let (code, out, _) = retrolift(dir.path(), &["check", "ws.json"]);
    assert_eq!(code, 0, "{out}");
    assert!(!out.contains("INVALID"));
}

#[test]
fn broken_table_exits_one_and_names_the_triple() {
    let dir = workspace(&SMALL.replace("[[0,1,2],[1,1,2],[2,2,2]]", "[[0,1,2],[1,1,2],[2,1,2]]"));
    let (code, out, _) = retrolift(dir.path(), &["check", "ws.json"]);
    assert_eq!(code, 1);
    assert!(out.contains("join is not commutative: 1 ∨ 2 ≠ 2 ∨ 1"), "{out}");
}

#[test]
fn dangling_reference_exits_two_with_position() {
    let dir = workspace(&SMALL.replace("\"target\": \"three\"", "\"target\": \"four\""));
    let (code, _, err) = retrolift(dir.path(), &["check", "ws.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown semilattice \"four\""), "{err}");
    assert!(err.contains("line 12, column"), "{err}");
}

#[test]
fn syntax_error_exits_two() {
    let dir = workspace("{\"semilattices\": {");
    assert_eq!(retrolift(dir.path(), &["check", "ws.json"]).0, 2);
}

#[test]
fn missing_file_and_bad_flags_exit_two() {
    let dir = workspace(SMALL);
    assert_eq!(retrolift(dir.path(), &["check", "absent.json"]).0, 2);
    assert_eq!(retrolift(dir.path(), &["unfold", "ws.json", "d", "--depth", "x"]).0, 2);
    assert_eq!(retrolift(dir.path(), &["unfold", "ws.json", "nowhere"]).0, 2);
}

#[test]
fn non_embedding_arrow_is_refused_for_the_boolean_cover() {
    let dir = workspace(SMALL);
    let (code, _, err) = retrolift(dir.path(), &["unfold", "ws.json", "collapse", "--retraction", "boolean"]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("embedding"), "{err}");
}

#[test]
fn unfold_and_identity_replay_are_clean() {
    let dir = workspace(SMALL);
    let (code, out, err) = retrolift(dir.path(), &["unfold", "ws.json", "d", "--depth", "3", "--out", "bundle.json"]);
    assert_eq!(code, 0, "{out}{err}");
    let (code, out, err) = retrolift(dir.path(), &["replay", "bundle.json"]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.contains("certified"), "{out}");
}

#[test]
fn structured_output_is_json() {
    let dir = workspace(SMALL);
    let (code, out, _) = retrolift(dir.path(), &["unfold", "ws.json", "d", "--format", "structured"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v.is_object());
}

fn conc_size(dir: &Path, lattice: &str) -> u64 {
    let (code, out, err) = retrolift(dir, &["conc", "ws.json", lattice, "--format", "structured"]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    v["size"].as_u64().unwrap()
}

#[test]
fn conc_sizes_of_known_lattices() {
    let dir = workspace(SMALL);
    assert_eq!(conc_size(dir.path(), "c3"), 4);
    assert_eq!(conc_size(dir.path(), "m3"), 2);
    assert_eq!(conc_size(dir.path(), "point"), 1);
}

#[test]
fn budget_from_the_environment_is_enforced() {
    let dir = workspace(SMALL);
    let out = Command::new(env!("CARGO_BIN_EXE_retrolift"))
        .args(["unfold", "ws.json", "d", "--depth", "4"])
        .current_dir(dir.path())
        .env("RETROLIFT_BUDGET", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn conc_fixture_replays_and_rejects_a_broken_eta() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = retrolift(dir.path(), &["gen-fixture", "stable", "--depth", "2", "--out", "fx.json"]);
    assert_eq!(code, 0, "{err}");
    let (code, out, err) = retrolift(dir.path(), &["replay", "fx.json", "--functor", "conc", "--lift", "tower.lift"]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.contains("certified"), "{out}");

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fx.json")).unwrap()).unwrap();
    let table = &mut v["lift_packages"]["tower.lift"]["eta"][0][0];
    let len = table.as_array().unwrap().len();
    *table = Value::from(vec![0usize; len]);
    std::fs::write(dir.path().join("bad.json"), serde_json::to_string(&v).unwrap()).unwrap();
    let (code, _, err) = retrolift(dir.path(), &["replay", "bad.json", "--functor", "conc", "--lift", "tower.lift"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn conc_replay_without_a_lift_is_an_input_error() {
    let dir = workspace(SMALL);
    assert_eq!(retrolift(dir.path(), &["replay", "ws.json", "d", "--functor", "conc"]).0, 2);
}
