use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tensegrity")).args(args).output().expect("spawn")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn analyze_prism() {
    let out = run(&["analyze", fixture("3prism.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["generic_corank"], 6);
    assert_eq!(v["corank_at_p"], 7);
    assert_eq!(v["verdict"], "not_infinitesimally_rigid");
}

#[test]
fn prestress_prism() {
    let out = run(&["prestress", fixture("3prism.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "found");
    assert!(v["min_eigenvalue"].as_f64().unwrap() > 0.0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["analyze", "missing.json"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "x.json", "--svg"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dimension\": 2, \"nodes\": [[0, 0]], \"members\": [{\"i\": 1, \"j\": 1, \"kind\": \"bar\"}]}").unwrap();
    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn reports_are_reproducible() {
    let prism = fixture("3prism.json");
    let p = prism.to_str().unwrap();
    for args in [
        vec!["analyze", p, "--seed", "5"],
        vec!["prestress", p, "--seed", "5"],
        vec!["deform", p, "--seed", "5", "--epsilon", "-0.05"],
        vec!["epscheck", fixture("hinge.json").to_str().unwrap(), "--seed", "5"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn solve_writes_report_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("cubic.txt");
    std::fs::write(&sys, "# x^3 - 7x^2 + 17x - 15\nx^3 - 7*x^2 + 17*x - 15\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&["solve", sys.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--svg"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["converged"], 3);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("solve.json")).unwrap()).unwrap();
    assert_eq!(written, v);

    let svg = std::fs::read_to_string(out_dir.join("solve.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let lines: Vec<_> = doc.descendants().filter(|n| n.attribute("class") == Some("trajectory")).collect();
    assert_eq!(lines.len(), 3);
    let ends: Vec<(f64, f64)> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("endpoint"))
        .map(|n| (n.attribute("data-re").unwrap().parse().unwrap(), n.attribute("data-im").unwrap().parse().unwrap()))
        .collect();
    assert_eq!(ends.len(), 3);
    for want in [(3.0, 0.0), (2.0, 1.0), (2.0, -1.0)] {
        assert!(ends.iter().any(|e| (e.0 - want.0).abs() < 1e-8 && (e.1 - want.1).abs() < 1e-8), "{ends:?}");
    }
}

#[test]
fn solve_two_circles() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.txt");
    std::fs::write(&sys, "x^2 - 1\ny^2 - 4\n").unwrap();
    let v = json(&run(&["solve", sys.to_str().unwrap()]));
    assert_eq!(v["variables"], serde_json::json!(["x", "y"]));
    assert_eq!(v["converged"], 4);
}

#[test]
fn flexes_svg_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["flexes", fixture("3prism.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--svg"]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("flexes.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let count = |class: &str| doc.descendants().filter(|n| n.attribute("class") == Some(class)).count();
    assert_eq!(count("node"), 6);
    assert_eq!(doc.descendants().filter(|n| n.attribute("class").is_some_and(|c| c.starts_with("member "))).count(), 12);
    assert_eq!(count("arrows"), 7);
}

#[test]
fn verify_ideals_passes() {
    let out = run(&["verify-ideals"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["slingshot"]["minors"], 120);
    assert_eq!(v["slingshot"]["nonzero_minors"], 95);
    assert_eq!(v["slingshot"]["generators"], 102);
    assert_eq!(v["slingshot"]["primes"].as_array().unwrap().len(), 8);
    assert_eq!(v["adjacent_2x5"]["primes"].as_array().unwrap().len(), 5);
}

#[test]
fn plot_to_stdout() {
    let out = run(&["plot", fixture("square.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8(out.stdout).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
}
