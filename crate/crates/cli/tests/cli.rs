use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assouad-kit")).args(args).output().unwrap()
}

fn kit_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assouad-kit"))
        .args(args)
        .env(key, value)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn read_json(p: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn worked_example_suite_and_alias() {
    for name in ["carpet-worked-example", "carpet-8.6.1"] {
        let o = kit(&["verify", name]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        let text = stdout(&o);
        assert_eq!(text.matches("[PASS]").count(), 4);
        assert!(text.contains("expected 1.3135, observed 1.313536, tolerance 1e-4"), "{text}");
        assert!(text.contains("reference:"));
        assert!(text.contains("cannot be reproduced on finite samples"));
    }
}

#[test]
fn lattice_and_cantor_suites_pass() {
    let o = kit(&["verify", "lattice", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["failed"], 0);
    assert!(v["checks"].as_array().unwrap().len() >= 8);
    let o = kit(&["verify", "estimator-cantor"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(kit(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(kit(&["generate"]).status.code(), Some(2));
    assert_eq!(kit(&["estimate", "--input", "/no/such/file", "--method", "box"]).status.code(), Some(2));
    assert_eq!(kit(&["spectrum", "--kind", "lower", "sequence"]).status.code(), Some(2));
}

#[test]
fn cap_errors_exit_three() {
    let o = kit_env(&["percolate", "--p", "0.9", "--depth", "10"], "ASSOUAD_KIT_CAP", "1000");
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("suggested depth 5"));
    let o = kit_env(
        &["generate", "attractor", "--preset", "cantor", "--depth", "20"],
        "ASSOUAD_KIT_CAP",
        "4096",
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn generate_then_estimate_with_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let set = path(dir.path(), "cantor.csv");
    let report = path(dir.path(), "box.json");
    let o = kit(&["generate", "attractor", "--preset", "cantor", "--depth", "12", "-o", &set]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&set).unwrap().starts_with("# assouad-kit pointset v1, d=1"));

    let o = kit(&["estimate", "--input", &set, "--method", "box", "--k-min", "4", "--k-max", "14", "-o", &report]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&report);
    let est = v["report"]["estimate"].as_f64().unwrap();
    assert!((est - 2f64.ln() / 3f64.ln()).abs() < 0.05, "{est}");
    assert_eq!(v["points"], 4096);

    let m = read_json(&format!("{report}.manifest.json"));
    assert_eq!(m["schema"], "assouad-kit manifest v1");
    let hash = m["input_hashes"][&set].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(m["command_line"].as_array().unwrap().iter().any(|a| a == "estimate"));
    assert!(Path::new(&format!("{set}.manifest.json")).exists());
}

#[test]
fn seed_determines_percolation_output() {
    let run = |seed: &str| stdout(&kit(&["percolate", "--p", "0.8", "--depth", "8", "--seed", seed, "--emit", "pointset"]));
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
    let v: Value = serde_json::from_str(&stdout(&kit(&["percolate", "--p", "0.8", "--depth", "6"]))).unwrap();
    assert_eq!(v["Z_k"].as_array().unwrap().len(), 7);
}

#[test]
fn plot_is_deterministic_with_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let curve = path(dir.path(), "carpet.csv");
    let o = kit(&["spectrum", "system", "--preset", "two-three-carpet", "--grid", "19", "-o", &curve]);
    assert_eq!(o.status.code(), Some(0));
    let args = |out: &str| {
        kit(&["plot", "--curve", &curve, "--bounds", "0.5,1", "--d", "2", "-o", out]).status.code()
    };
    let (a, b) = (path(dir.path(), "a.svg"), path(dir.path(), "b.svg"));
    assert_eq!(args(&a), Some(0));
    assert_eq!(args(&b), Some(0));
    let svg = std::fs::read(&a).unwrap();
    assert_eq!(svg, std::fs::read(&b).unwrap());
    let text = String::from_utf8(svg).unwrap();
    assert_eq!(text.matches("stroke-dasharray").count(), 4);
    assert!(text.contains("assouad spectrum: carpet formula"));
}

#[test]
fn estimated_curve_feeds_plot() {
    let dir = tempfile::tempdir().unwrap();
    let set = path(dir.path(), "f.csv");
    let curve = path(dir.path(), "est.csv");
    let o = kit(&["generate", "sequence", "--p", "1", "--n-max", "65536", "-o", &set]);
    assert_eq!(o.status.code(), Some(0));
    let o = kit(&["estimate", "--input", &set, "--method", "spectrum", "--curve", "3", "--k-max", "12", "-o", &curve]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&curve).unwrap();
    assert!(text.starts_with("# assouad-kit spectrum v1, kind=assouad"));
    assert_eq!(text.lines().count(), 5);
    let o = kit(&["plot", "--curve", &curve]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("<svg"));
}

#[test]
fn dimension_of_ifs_documents() {
    let dir = tempfile::tempdir().unwrap();
    let doc = path(dir.path(), "sys.json");
    std::fs::write(
        &doc,
        r#"{"v":1,"kind":"ifs","d":2,"maps":[
            {"linear":[[0.5,0],[0,0.25]],"translation":[0,0],"kind":"affine"},
            {"linear":[[0.5,0],[0,0.25]],"translation":[0.5,0.75],"kind":"affine"}]}"#,
    )
    .unwrap();
    let v: Value = serde_json::from_str(&stdout(&kit(&["dimension", "system", "--system", &doc]))).unwrap();
    let s = v["affinity"]["dimension"].as_f64().unwrap();
    assert!((s - 1.0).abs() < 1e-9, "{s}");

    let v: Value =
        serde_json::from_str(&stdout(&kit(&["dimension", "system", "--preset", "cantor", "--separated"]))).unwrap();
    let want = 2f64.ln() / 3f64.ln();
    assert!((v["similarity_dimension"].as_f64().unwrap() - want).abs() < 1e-12);
    assert!((v["report"]["assouad"].as_f64().unwrap() - want).abs() < 1e-12);
}
