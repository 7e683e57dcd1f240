//! Command-line behaviour: outputs, report files and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("dea-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_str().unwrap().to_string()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        std::fs::remove_dir_all(&self.0).ok();
    }
}

const FOUR_ROTATIONS: &str = r#"{"qubits":1,"gates":[
  {"type":"rz","qubit":0,"param":"t1"},{"type":"rx","qubit":0,"param":"t2"},
  {"type":"rz","qubit":0,"param":"t3"},{"type":"ry","qubit":0,"param":"t4"}]}"#;

const WITH_PHASE: &str = r#"{"qubits":1,"gates":[
  {"type":"rz","qubit":0,"param":"phi"},{"type":"rx","qubit":0,"param":"t1"},
  {"type":"rz","qubit":0,"param":"t2"},{"type":"ry","qubit":0,"param":"t3"}],
  "symmetry_params":["phi"]}"#;

fn dea(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dea")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn analyze_classifies_and_writes_csv() {
    let s = Scratch::new("analyze");
    let circuit = s.file("c.json", FOUR_ROTATIONS);
    let theta = s.file("t.json", "[0.3, 1.1, 0.7, 2.0]");
    let csv = s.path("steps.csv");
    let o = dea(&["analyze", "--circuit", &circuit, "--theta", &theta, "--csv", &csv]);
    assert_eq!(o.status.code(), Some(0));
    let verdicts: Vec<String> =
        json(&o)["parameters"].as_array().unwrap().iter().map(|p| p["verdict"].as_str().unwrap().into()).collect();
    assert_eq!(verdicts, ["independent", "independent", "independent", "redundant"]);
    let text = read(&csv);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,lambda_min,lambda_min_std,lambda_second,lambda_second_std,shots,seed");
    let ks: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ks, ["2", "3", "4"]);
    assert!(lines[1..].iter().all(|l| l.ends_with(",exact,")));
}

#[test]
fn analyze_with_shots_records_seed_and_spread() {
    let s = Scratch::new("shots");
    let circuit = s.file("c.json", FOUR_ROTATIONS);
    let csv = s.path("steps.csv");
    let args = ["analyze", "--circuit", &circuit, "--random-theta", "--seed", "7", "--shots", "8000", "--csv", &csv];
    assert_eq!(dea(&args).status.code(), Some(0));
    for line in read(&csv).lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(&cols[5..], ["8000", "7"]);
        assert!(cols[2].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn theta_object_must_name_every_parameter() {
    let s = Scratch::new("theta");
    let circuit = s.file("c.json", FOUR_ROTATIONS);
    let theta = s.file("t.json", r#"{"t1": 0.3, "t2": 1.1, "t3": 0.7}"#);
    let o = dea(&["analyze", "--circuit", &circuit, "--theta", &theta]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: input:"));
}

#[test]
fn reduce_drops_phase_and_freezes_redundant_rotation() {
    let s = Scratch::new("reduce");
    let circuit = s.file("c.json", WITH_PHASE);
    let theta = s.file("t.json", r#"{"t1": 0.3, "t2": 1.1, "t3": 0.7}"#);
    let o = dea(&["reduce", "--circuit", &circuit, "--theta", &theta]);
    assert_eq!(o.status.code(), Some(0));
    let gates = json(&o)["gates"].as_array().unwrap().clone();
    let kinds: Vec<&str> = gates.iter().map(|g| g["type"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["rx", "rz", "ry"]);
    assert_eq!(gates[2]["angle"].as_f64(), Some(0.7));

    let o = dea(&["reduce", "--circuit", &circuit, "--theta", &theta, "--freeze", "zero"]);
    let kinds: Vec<String> =
        json(&o)["gates"].as_array().unwrap().iter().map(|g| g["type"].as_str().unwrap().into()).collect();
    assert_eq!(kinds, ["rx", "rz"]);
}

#[test]
fn sectors_table_and_json() {
    let o = dea(&["sectors", "--qubits", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Vec<usize>> =
        stdout(&o).lines().skip(1).map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows, [[4, 0, 1, 11], [4, 1, 4, 5], [4, 2, 2, 7], [4, 3, 4, 5]]);
    let v = json(&dea(&["sectors", "--qubits", "3", "--json"]));
    assert_eq!(v["Q"], 3);
    assert_eq!(v["sectors"][0]["dim"], 7);
}

#[test]
fn build_emits_sector_circuit_and_verification() {
    let s = Scratch::new("build");
    let out = s.path("c.json");
    let report = s.path("v.json");
    let o = dea(&["build", "--qubits", "3", "--output", &out, "--report", &report]);
    assert_eq!(o.status.code(), Some(0));
    let c: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    assert_eq!(c["gates"].as_array().unwrap().len(), 7);
    let v: serde_json::Value = serde_json::from_str(&read(&report)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["expected_dimension"], 7);

    // The emitted circuit analyses as fully independent.
    let a = dea(&["analyze", "--circuit", &out, "--random-theta", "--seed", "1"]);
    assert!(json(&a)["parameters"].as_array().unwrap().iter().all(|p| p["verdict"] == "independent"));
}

#[test]
fn bestapprox_grid_reports_certified_epsilon() {
    let s = Scratch::new("bestapprox");
    let circuit = s.file("c.json", r#"{"qubits":1,"gates":[{"type":"rx","qubit":0,"param":"t1"}]}"#);
    let o = dea(&["bestapprox", "--circuit", &circuit, "--grid", "16", "--space", "span", "--volume"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    // Midpoint grid: every θ is within h/2 of a node and the image moves at speed 1/2.
    let h = std::f64::consts::TAU / 16.0;
    assert!((v["epsilon"].as_f64().unwrap() - h / 4.0).abs() < 1e-12);
    assert_eq!(v["method"], "circle");
    assert!((v["volume"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-9);
    assert_eq!(v["flagged_exceeds_diameter"], true);
}

#[test]
fn exit_codes_separate_input_and_numerical_errors() {
    let o = dea(&["analyze", "--circuit", "/nonexistent/c.json", "--random-theta"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(dea(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dea(&["sectors", "--qubits", "0"]).status.code(), Some(2));
    assert_eq!(dea(&["--help"]).status.code(), Some(0));

    let s = Scratch::new("exit");
    let circuit = s.file(
        "c.json",
        r#"{"qubits":1,"gates":[{"type":"rx","qubit":0,"param":"a"},{"type":"rx","qubit":0,"param":"b"}]}"#,
    );
    let o = dea(&["bestapprox", "--circuit", &circuit, "--grid", "8,8", "--volume"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: numerical:"));
}
