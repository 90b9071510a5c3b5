use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

/// Writes `text` to a fresh file under the target temp dir.
fn temp_tree(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(format!("{name}.tree"));
    std::fs::write(&path, text).unwrap();
    path
}

fn hurwitz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hurwitz")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("terminated by signal")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = hurwitz(&all);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)));
    (code(&o), v)
}

const TYPE_II: &str = r#"{"p": 3, "N": 1, "d0": 0, "root": "r1", "vertices": ["r1", "s", "r2", "f1", "f2"],
  "edges": [
    {"from": "r1", "to": "s", "eps": 1, "m": 1, "h": 0},
    {"from": "s", "to": "r2", "eps": 1, "m": -1, "h": 0},
    {"from": "s", "to": "f1", "eps": 0, "m": 0, "h": 1},
    {"from": "s", "to": "f2", "eps": 0, "m": 0, "h": 2}
  ]}"#;

/// p = 5, N = 4: `s` carries residues with no one-block maximal partition.
const HARD_STAR: &str = r#"{"p": 5, "N": 4, "d0": 0, "root": "r", "vertices": ["r", "s", "f1", "f2", "f3", "f4", "f5"],
  "edges": [
    {"from": "r", "to": "s", "eps": 1, "m": 4, "h": 0},
    {"from": "s", "to": "f1", "eps": 0, "m": 0, "h": 1},
    {"from": "s", "to": "f2", "eps": 0, "m": 0, "h": 4},
    {"from": "s", "to": "f3", "eps": 0, "m": 0, "h": 2},
    {"from": "s", "to": "f4", "eps": 0, "m": 0, "h": 2},
    {"from": "s", "to": "f5", "eps": 0, "m": 0, "h": 1}
  ]}"#;

#[test]
fn validate_fixture_and_envelope() {
    let f = fixture("p5_conductor32.tree");
    let (c, v) = json(&["validate", f.to_str().unwrap()]);
    assert_eq!(c, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "validate");
    assert_eq!(v["exit_code"], 0);
    assert_eq!(v["valid"], true);
}

#[test]
fn violations_carry_locations() {
    let bad = TYPE_II.replace(r#""h": 2}"#, r#""h": 1}"#);
    let path = temp_tree("bad_residues", &bad);
    let (c, v) = json(&["validate", path.to_str().unwrap()]);
    assert_eq!(c, 1);
    let viol = &v["violations"][0];
    assert_eq!(viol["axiom"], "H3");
    assert_eq!(viol["location"]["type"], "Vertex");
    assert_eq!(viol["location"]["id"], "s");
}

#[test]
fn check_disk_on_fixture() {
    let f = fixture("p5_conductor32.tree");
    let (c, v) = json(&["check-disk", f.to_str().unwrap(), "--budget", "1000000"]);
    assert_eq!(c, 0, "{v}");
    assert_eq!(v["verdict"]["verdict"], "RealizableProved");
}

#[test]
fn unknown_realizability_exits_2() {
    let path = temp_tree("hard_star", HARD_STAR);
    let o = hurwitz(&["check-disk", path.to_str().unwrap(), "--nmax", "1", "--budget", "1"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stdout));
    let o = hurwitz(&["certify-vertex", path.to_str().unwrap(), "--vertex", "s", "--nmax", "1", "--budget", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn annulus_commands() {
    let path = temp_tree("type_ii", TYPE_II);
    let p = path.to_str().unwrap();
    let (c, v) = json(&["check-annulus", p]);
    assert_eq!(c, 0);
    assert_eq!(v["thickness"], 2);
    assert_eq!(v["fundamental_chain"], serde_json::json!(["r1", "s", "r2"]));
    let (c, v) = json(&["conductor-type", p]);
    assert_eq!(c, 0);
    assert_eq!(v["type"], "II");
    assert_eq!(code(&hurwitz(&["structure", p])), 0);
    // Disk condition D2 fails: the thick edge into r2 is not a leaf.
    assert_eq!(code(&hurwitz(&["check-disk", p])), 1);
}

#[test]
fn certify_and_classify() {
    let path = temp_tree("type_ii_cert", TYPE_II);
    let p = path.to_str().unwrap();
    let (c, v) = json(&["certify-vertex", p, "--vertex", "s"]);
    assert_eq!(c, 0);
    assert_eq!(v["status"]["status"], "Certified");
    assert_eq!(code(&hurwitz(&["certify-vertex", p, "--vertex", "r1"])), 1);
    assert_eq!(code(&hurwitz(&["certify-vertex", p, "--vertex", "nowhere"])), 3);
    let (_, v) = json(&["classify", p, "--vertex", "s"]);
    assert_eq!(v["vertices"][0]["kind"], "Multiplicative");
    let (_, v) = json(&["differente", p]);
    let ds: Vec<&str> = v["differente"].as_array().unwrap().iter().map(|r| r["d"].as_str().unwrap()).collect();
    assert_eq!(ds, ["0", "2", "0", "2", "2"]);
}

#[test]
fn search_point_exit_codes() {
    let (c, v) = json(&["search-point", "--p", "2", "--e", "1,1,1,1"]);
    assert_eq!(c, 0);
    assert_eq!(v["point"]["n"], 2);
    // No point over F_27 or below; the search is complete, so this is "not found", not an error.
    let (c, v) = json(&["search-point", "--p", "3", "--e", "1,1,1,1,1,1"]);
    assert_eq!(c, 2);
    assert_eq!(v["budget_exhausted"], false);
    let (c, v) = json(&["search-point", "--p", "3", "--e", "1,-1,1,-1", "--annulus", "2,2"]);
    assert_eq!(c, 0, "{v}");
    assert_eq!(code(&hurwitz(&["search-point", "--p", "3", "--e", "1,1"])), 3);
}

#[test]
fn boundary_command() {
    let (c, v) = json(&["boundary", "--kind", "additive", "--m", "1", "--n", "1", "--p", "3", "--N", "2", "--check-order", "--profile", "0,1/2,1"]);
    assert_eq!(c, 0, "{v}");
    assert_eq!(v["boundary_differente"], 2);
    assert_eq!(v["order_p"], true);
    let ds: Vec<&str> = v["profile"].as_array().unwrap().iter().map(|r| r["d"].as_str().unwrap()).collect();
    assert_eq!(ds, ["2", "1", "0"]);
    let (c, _) = json(&["boundary", "--kind", "mult-exact", "--m", "2", "--p", "3", "--N", "1", "--profile", "1"]);
    assert_eq!(c, 2);
    assert_eq!(code(&hurwitz(&["boundary", "--kind", "mult-exact", "--m", "3", "--p", "3", "--N", "1"])), 3);
}

#[test]
fn input_errors_exit_3() {
    assert_eq!(code(&hurwitz(&["validate", "/nonexistent/tree.json"])), 3);
    let path = temp_tree("syntax", "{\"p\": 3,\n \"N\": }");
    let (c, v) = json(&["validate", path.to_str().unwrap()]);
    assert_eq!(c, 3);
    assert!(v["error"].as_str().unwrap().contains("line 2"), "{v}");
    let dangling = TYPE_II.replace(r#""to": "f2""#, r#""to": "f9""#);
    let path = temp_tree("dangling", &dangling);
    assert_eq!(code(&hurwitz(&["validate", path.to_str().unwrap()])), 3);
    assert_eq!(code(&hurwitz(&["validate"])), 3);
    assert_eq!(code(&hurwitz(&["no-such-command"])), 3);
    assert_eq!(code(&hurwitz(&["--help"])), 0);
}

#[test]
fn out_of_range_residue_is_reduced_with_warning() {
    let path = temp_tree("big_h", &TYPE_II.replace(r#""h": 2}"#, r#""h": 5}"#));
    let o = hurwitz(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("reduced to 2"));
}

#[test]
fn partitions_and_dot() {
    let f = fixture("p5_partitions.json");
    let (c, v) = json(&["partitions", f.to_str().unwrap()]);
    assert_eq!(c, 0);
    assert_eq!(v["cases"].as_array().unwrap().len(), 4);
    let t = fixture("p5_conductor32.tree");
    let o = hurwitz(&["dot", t.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("digraph hurwitz {"));
}
