use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TYPE1: &str = r#"{"variant":"type1","n":2,"C":[[1,0],[0,0]],"b":[1,2],
  "constraints":[{"A":[[2,0],[0,1]]},{"A":[[1,0.3],[0.3,2]]}]}"#;

const TYPE2: &str = r#"{"variant":"type2","n":3,"C":[[2,0,0],[0,1,0],[0,0,1]],"b":[1,1,2],
  "constraints":[{"A":[[1,0,0],[0,1,0],[0,0,1]]},{"A":[[3,1,0],[1,2,0],[0,0,1]]},{"A":[[1,0,0],[0,2,0],[0,0,4]]}]}"#;

const ROBUST: &str = r#"{"variant":"type1","n":2,"C":[[1,0],[0,1]],"b":[1,1],"constraints":[
  {"A0":[[1,0],[0,1]],"perturbations":[[[1,0],[0,0]],[[0,0],[0,1]]],
   "set":{"kind":"ellipsoid","delta0":[0.5,0.5],"D":[[0.1,0],[0,0.2]]}},
  {"A0":[[2,0],[0,1]],"perturbations":[[[0.5,0.5],[0.5,0.5]]],"set":{"kind":"box","delta0":[0.2],"rho":0.3}}]}"#;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn pcsdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcsdp")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn solve_then_verify_type1() {
    let ws = Workspace::new();
    let input = ws.file("t1.json", TYPE1);
    let out = ws.path("t1.sol.json");
    let trace = ws.path("t1.ndjson");
    let run = pcsdp(&["solve", "--input", s(&input), "--output", s(&out), "--eps", "0.1", "--trace", s(&trace)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));

    let doc = json(&out);
    assert!(doc["certificates"]["max_violation"].as_f64().unwrap() <= 1e-7);
    assert!(doc["report"]["certificate"]["passed"].as_bool().unwrap());
    assert_eq!(doc["report"]["variant"], "type1");

    let lines: Vec<Value> = std::fs::read_to_string(&trace)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len() as u64, doc["iterations"].as_u64().unwrap());
    for key in ["t", "s", "eps_s", "theta", "nu", "oracle_index", "phi"] {
        assert!(lines[0].get(key).is_some(), "trace record lacks {key}");
    }

    let check = pcsdp(&["verify", "--input", s(&input), "--solution", s(&out), "--eps", "0.1"]);
    assert_eq!(check.status.code(), Some(0));
    let cert: Value = serde_json::from_slice(&check.stdout).unwrap();
    assert_eq!(cert["passed"], true);
}

#[test]
fn mwu_solves_covering_and_rejects_packing() {
    let ws = Workspace::new();
    let t2 = ws.file("t2.json", TYPE2);
    let run = pcsdp(&["solve", "--input", s(&t2), "--solver", "mwu", "--eps", "0.2"]);
    assert_eq!(run.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(doc["report"]["solver"], "mwu");

    let t1 = ws.file("t1.json", TYPE1);
    let run = pcsdp(&["solve", "--input", s(&t1), "--solver", "mwu"]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("type2"));
}

#[test]
fn robust_instance_reports_measures() {
    let ws = Workspace::new();
    let input = ws.file("r.json", ROBUST);
    let out = ws.path("r.sol.json");
    let run = pcsdp(&["solve", "--input", s(&input), "--output", s(&out)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let doc = json(&out);
    let measures = doc["measures"].as_object().unwrap();
    assert!(!measures.is_empty());
    for atoms in measures.values() {
        for atom in atoms.as_array().unwrap() {
            assert!(atom["weight"].as_f64().unwrap() > 0.0);
        }
    }
    let check = pcsdp(&["verify", "--input", s(&input), "--solution", s(&out)]);
    assert_eq!(check.status.code(), Some(0));
}

#[test]
fn normalize_writes_identity_objective() {
    let ws = Workspace::new();
    let input = ws.file("t2.json", TYPE2);
    let run = pcsdp(&["normalize", "--input", s(&input)]);
    assert_eq!(run.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&run.stdout).unwrap();
    let n = doc["n"].as_u64().unwrap() as usize;
    for i in 0..n {
        for j in 0..n {
            assert_eq!(doc["C"][i][j].as_f64().unwrap(), if i == j { 1.0 } else { 0.0 });
        }
    }
    assert!(doc["b"].as_array().unwrap().iter().all(|b| b.as_f64() == Some(1.0)));
}

#[test]
fn runs_are_byte_identical() {
    let ws = Workspace::new();
    let input = ws.file("t2.json", TYPE2);
    let a = pcsdp(&["solve", "--input", s(&input), "--seed", "7"]);
    let b = pcsdp(&["solve", "--input", s(&input), "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn tampered_solution_fails_certificate() {
    let ws = Workspace::new();
    let input = ws.file("t1.json", TYPE1);
    let out = ws.path("sol.json");
    assert_eq!(pcsdp(&["solve", "--input", s(&input), "--output", s(&out)]).status.code(), Some(0));
    let mut doc = json(&out);
    for row in doc["X"].as_array_mut().unwrap() {
        for v in row.as_array_mut().unwrap() {
            *v = Value::from(v.as_f64().unwrap() * 3.0);
        }
    }
    let bad = ws.file("bad.json", &doc.to_string());
    let check = pcsdp(&["verify", "--input", s(&input), "--solution", s(&bad)]);
    assert_eq!(check.status.code(), Some(3));
    let cert: Value = serde_json::from_slice(&check.stdout).unwrap();
    assert_eq!(cert["passed"], false);
    assert!(cert["max_primal_violation"].as_f64().unwrap() > 0.0);
}

#[test]
fn error_exit_codes() {
    let ws = Workspace::new();
    assert_eq!(pcsdp(&["solve"]).status.code(), Some(1));
    assert_eq!(pcsdp(&["solve", "--input", "x.json", "--eps", "0.7"]).status.code(), Some(1));
    assert_eq!(pcsdp(&["--help"]).status.code(), Some(0));
    assert_eq!(pcsdp(&["solve", "--input", s(&ws.path("missing.json"))]).status.code(), Some(2));
    let garbage = ws.file("g.json", "{not json");
    assert_eq!(pcsdp(&["solve", "--input", s(&garbage)]).status.code(), Some(2));
    let asym = ws.file("a.json", r#"{"variant":"type1","n":2,"C":[[1,1],[0,1]],"b":[1],"constraints":[{"A":[[1,0],[0,1]]}]}"#);
    let run = pcsdp(&["solve", "--input", s(&asym)]);
    assert_eq!(run.status.code(), Some(2));
    assert!(!run.stderr.is_empty());
}

#[test]
fn in_process_entry_point() {
    let ws = Workspace::new();
    let input = ws.file("t1.json", TYPE1);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = pcsdp::cli::run_with(["pcsdp", "solve", "--input", s(&input), "--theta", "direct"], &mut out, &mut err);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_slice(&out).unwrap();
    assert!(doc["primal_objective"].as_f64().unwrap() > 0.0);
}
