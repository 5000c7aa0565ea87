use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const AUTHORSHIP: &str = "\
author_id,paper_id,area,journal
a,p1,Stat,J1
b,p1,Stat,J1
b,p2,Prob,J2
c,p2,Prob,J2
c,p3,Stat,J1
d,p3,Stat,J1
a,p4,Prob,J1
d,p4,Prob,J1
e,p5,Stat,J2
a,p5,Stat,J2
";

const CITATIONS: &str = "\
citing_paper,cited_paper
p2,p1
p3,p1
p3,p2
p4,p2
p4,p3
p5,p4
p5,p1
p1,p3
p2,p5
";

fn netfiber(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netfiber"))
        .args(args)
        .env_remove("NETFIBER_SEED")
        .output()
        .expect("binary runs")
}

fn data_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("authorship.csv"), AUTHORSHIP).unwrap();
    std::fs::write(dir.path().join("citations.csv"), CITATIONS).unwrap();
    dir
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn zero_threshold_is_a_usage_error() {
    let dir = data_dir();
    let out = netfiber(&["threshold", "--c", "0", "--data", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("threshold must be ≥ 1"));
}

#[test]
fn gof_reruns_are_byte_identical() {
    let dir = data_dir();
    let args = ["gof", "--model", "p1", "--rho", "dyadic", "--steps", "1000", "--seed", "7", "--data", path(dir.path())];
    let a = netfiber(&args);
    let b = netfiber(&args);
    assert!(a.status.success(), "stderr: {}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["manifest"]["seed"], 7);
    assert_eq!(v["manifest"]["wall_clock"], Value::Null);
    let p = v["result"]["test"]["p_value"].as_f64().unwrap();
    assert!(p > 0.0 && p <= 1.0);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = data_dir();
    let out = Command::new(env!("CARGO_BIN_EXE_netfiber"))
        .args(["gof", "--model", "beta", "--steps", "200", "--data", path(dir.path())])
        .env("NETFIBER_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(json(&out)["manifest"]["seed"], 11);
}

#[test]
fn malformed_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("authorship.csv"), "author_id,paper_id\na\n").unwrap();
    let out = netfiber(&["ingest", "--data", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("nope");
    let out = netfiber(&["ingest", "--data", path(&missing)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_citations_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("authorship.csv"), AUTHORSHIP).unwrap();
    let out = netfiber(&["fit-p1", "--data", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    // the coauthor network needs only authorship
    let out = netfiber(&["fit-beta", "--data", path(dir.path())]);
    assert!(json(&out)["result"]["fit"].is_object());
}

#[test]
fn every_subcommand_has_help() {
    for sub in ["ingest", "threshold", "cores", "degrees", "hyper", "fit-beta", "fit-p1", "gof", "export-dot"] {
        let out = netfiber(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"), "{sub}");
    }
    assert_eq!(netfiber(&[]).status.code(), Some(1));
}

#[test]
fn ingest_counts_inputs() {
    let dir = data_dir();
    let v = json(&netfiber(&["ingest", "--table", "--data", path(dir.path())]));
    let r = &v["result"];
    assert_eq!(r["authors"], 5);
    assert_eq!(r["papers"], 5);
    assert_eq!(r["authorship_pairs"], 10);
    assert_eq!(r["paper_citations"]["edges"], 9);
    let inputs = v["manifest"]["inputs"].as_array().unwrap();
    assert_eq!(inputs.len(), 2);
    assert_eq!(inputs[0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn cores_and_degrees_agree_on_node_count() {
    let dir = data_dir();
    let d = path(dir.path());
    let cores = json(&netfiber(&["cores", "--top", "2", "--data", d]));
    let degrees = json(&netfiber(&["degrees", "--data", d]));
    let n = degrees["result"]["network"]["nodes"].as_u64().unwrap();
    assert_eq!(cores["result"]["core_number"].as_object().unwrap().len() as u64, n);
    assert_eq!(degrees["result"]["in_degree"].as_object().unwrap().len() as u64, n);
}

#[test]
fn out_file_receives_the_report() {
    let dir = data_dir();
    let target = dir.path().join("report.json");
    let out = netfiber(&["hyper", "--data", path(dir.path()), "--out", path(&target)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&target).unwrap()).unwrap();
    assert_eq!(v["manifest"]["command"], "hyper");
}

#[test]
fn dot_export_carries_the_manifest() {
    let dir = data_dir();
    let out = netfiber(&["export-dot", "--what", "hypergraph", "--data", path(dir.path())]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().next().unwrap();
    let manifest: Value = serde_json::from_str(first.strip_prefix("// netfiber manifest: ").unwrap()).unwrap();
    assert_eq!(manifest["config"]["what"], "hypergraph");
    assert!(text.contains('{'));
}

#[test]
fn samples_file_holds_one_f64_per_sample() {
    let dir = data_dir();
    let samples = dir.path().join("s.bin");
    let v = json(&netfiber(&[
        "gof", "--model", "beta", "--steps", "300", "--burn-in", "0", "--thin", "3", "--seed", "1",
        "--samples-out", path(&samples), "--data", path(dir.path()),
    ]));
    let count = v["result"]["test"]["sampled"]["count"].as_u64().unwrap();
    assert_eq!(std::fs::metadata(&samples).unwrap().len(), 8 * count);
}
