use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk")).args(args).env_remove("QWALK_SEED").output().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn karate_quantumness() {
    let v = stdout_json(&qwalk(&["quantumness", "--fixture", "karate"]));
    let eps = v["epsilon"].as_f64().unwrap();
    assert!((eps - 0.1204).abs() < 5e-4, "{eps}");
    assert!((eps - v["epsilon_degree_form"].as_f64().unwrap()).abs() < 1e-10);
    assert_eq!(v["energy_bound_ok"], Value::Bool(true));
    assert_eq!(v["entropy_bound_ok"], Value::Bool(true));
}

#[test]
fn two_triangles_communities() {
    let dir = tempfile::tempdir().unwrap();
    let part = dir.path().join("p.json");
    let dend = dir.path().join("d.json");
    let out = qwalk(&[
        "communities",
        "--fixture",
        "two-triangles",
        "--closeness",
        "transport-inf",
        "--out",
        part.to_str().unwrap(),
        "--dendrogram",
        dend.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let p = read_json(&part);
    assert_eq!(p["assignment"], serde_json::json!([0, 0, 0, 1, 1, 1]));
    assert_eq!(read_json(&dend)["n"], 6);
    let manifest = read_json(&dir.path().join("p.json.manifest.json"));
    assert_eq!(manifest["command"], "communities");
    assert_eq!(manifest["params"]["closeness"], "transport-inf");
    assert!(dir.path().join("d.json.manifest.json").exists());
}

#[test]
fn nmi_with_itself_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    fs::write(&p, r#"{"assignment": [0, 0, 1, 2, 1, 2, 0]}"#).unwrap();
    let v = stdout_json(&qwalk(&["nmi", p.to_str().unwrap(), p.to_str().unwrap()]));
    assert!((v["nmi"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn gen_is_reproducible_and_records_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = qwalk(&["gen", "--model", "er", "--n", "60", "--m", "150", "--seed", "9", "-o", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let manifest = read_json(&dir.path().join("a.json.manifest.json"));
    assert_eq!(manifest["seeds"], serde_json::json!([9]));
    assert_eq!(manifest["params"]["spec"]["model"], "er");

    // the generated file feeds back in, and its digest lands in the manifest
    let q = dir.path().join("q.json");
    let out = qwalk(&["quantumness", "--graph", a.to_str().unwrap(), "-o", q.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = read_json(&dir.path().join("q.json.manifest.json"));
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn seed_from_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_qwalk"))
            .args(["gen", "--model", "ba", "--n", "30"])
            .env("QWALK_SEED", seed)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("4"), run("4"));
    assert_ne!(run("4"), run("5"));
    assert_eq!(run("4"), qwalk(&["gen", "--model", "ba", "--n", "30", "--seed", "4"]).stdout);
}

#[test]
fn walk_time_average_and_initial_states() {
    let v = stdout_json(&qwalk(&["walk", "--fixture", "karate", "--initial", "node:0", "--t", "inf"]));
    let pq: Vec<f64> = v["p_quantum"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let avg: Vec<f64> = v["p_time_averaged"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(pq.len(), 34);
    for (a, b) in pq.iter().zip(&avg) {
        assert!((a - b).abs() < 1e-10);
    }

    let dir = tempfile::tempdir().unwrap();
    let rho = dir.path().join("rho.json");
    fs::write(&rho, r#"{"n": 6, "entries": [[0,0,0.5,0],[3,3,0.5,0]]}"#).unwrap();
    let v = stdout_json(&qwalk(&["walk", "--fixture", "toy-coherent", "--initial", rho.to_str().unwrap()]));
    let total: f64 = v["p_quantum"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn perturb_table_as_csv() {
    let out = qwalk(&["perturb", "--fixture", "toy-coherent", "--sigmas", "0,1", "--samples", "8", "--csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sigma,mean_nmi,std_err,samples");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.0,1.0,0.0,8"), "{}", lines[1]);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| qwalk(args).status.code().unwrap();
    assert_eq!(code(&["quantumness", "--fixture", "karate", "--bogus"]), 2);
    assert_eq!(code(&["communities", "--fixture", "two-triangles", "--select", "k=0"]), 3);
    assert_eq!(code(&["communities", "--fixture", "two-triangles", "--closeness", "fidelity-short"]), 3);
    assert_eq!(code(&["quantumness", "--graph", "/nonexistent/graph.json"]), 5);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&["quantumness", "--graph", bad.to_str().unwrap()]), 2);

    // two disconnected triangles have no unique ground state
    assert_eq!(code(&["quantumness", "--fixture", "two-triangles"]), 3);
}
