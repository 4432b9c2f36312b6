//! End-to-end tests of the command line binary: exit codes, the JSON
//! document, file formats, and SVG output.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tropreg"))
}

fn testdata(name: &str) -> PathBuf {
    PathBuf::from(format!("{}/testdata/{name}", env!("CARGO_MANIFEST_DIR")))
}

fn run(args: &[&str]) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    cmd.output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn inradius_of_the_reference_configuration() {
    let out = run(&[
        "inradius",
        testdata("fig2.csv").to_str().unwrap(),
        "--method",
        "exact",
        "--json",
    ]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["method"], "exact");
    assert_eq!(doc["radius"].as_f64().unwrap(), 1.0);
    assert_eq!(doc["rho"].as_f64().unwrap(), -1.0);
    assert!(doc["verification"]["super_ok"].as_bool().unwrap());
    let center: Vec<f64> = doc["center"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(center.len(), 3);
}

#[test]
fn regress_emits_certificates_and_witnesses() {
    let out = run(&[
        "regress",
        testdata("fig2.csv").to_str().unwrap(),
        "--method",
        "exact",
        "--json",
    ]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["value"].as_f64().unwrap(), 1.0);
    assert!(doc["verification"]["sub_ok"].as_bool().unwrap());
    let witnesses: Vec<u64> = doc["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(witnesses.len(), 3);
    assert!([4, 5].contains(&witnesses[0]));
    assert!([6, 7].contains(&witnesses[1]));
    assert!([8, 9].contains(&witnesses[2]));
}

#[test]
fn typed_and_signed_modes() {
    let out = run(&[
        "regress",
        testdata("typed11.csv").to_str().unwrap(),
        "--typed",
        testdata("types11.csv").to_str().unwrap(),
        "--method",
        "exact",
        "--json",
    ]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["value"].as_f64().unwrap(), 2.0);

    let out = run(&[
        "regress",
        testdata("fig2.csv").to_str().unwrap(),
        "--signed",
        "I=1,2",
        "J=3",
        "--json",
    ]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert!(doc["value"].as_f64().unwrap() >= 0.0);
    assert!(doc.get("interval_radius").is_some());
}

#[test]
fn degenerate_instances_exit_with_3() {
    let out = run(&["inradius", testdata("diag3.csv").to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(3));
    let doc = stdout_json(&out);
    assert_eq!(doc["radius"], serde_json::json!("inf"));
    assert!(!doc["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn bad_input_exits_with_2() {
    let dir = std::env::temp_dir().join("tropreg-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let ragged = dir.join("ragged.csv");
    std::fs::write(&ragged, "0,1\n2\n").unwrap();
    let out = run(&["inradius", ragged.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["inradius", dir.join("missing.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // clap usage errors also use exit code 2
    let out = run(&["regress"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_convergence_exits_with_4_and_emits_bounds() {
    let out = run(&[
        "regress",
        testdata("fig2.csv").to_str().unwrap(),
        "--max-iter",
        "1",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let doc = stdout_json(&out);
    let lo = doc["bounds"]["lower"].as_f64().unwrap();
    let hi = doc["bounds"]["upper"].as_f64().unwrap();
    assert!(lo <= 1.0 && 1.0 <= hi, "bounds [{lo}, {hi}] miss the value");
}

#[test]
fn svg_output_is_deterministic() {
    let dir = std::env::temp_dir().join("tropreg-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let svg1 = dir.join("fig2a.svg");
    let svg2 = dir.join("fig2b.svg");
    for path in [&svg1, &svg2] {
        let out = run(&[
            "regress",
            testdata("fig2.csv").to_str().unwrap(),
            "--method",
            "exact",
            "--svg",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let a = std::fs::read(&svg1).unwrap();
    let b = std::fs::read(&svg2).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    // 9 data points, the apex marker, and the three hyperplane rays
    assert_eq!(text.matches("<circle").count(), 10);
    assert_eq!(text.matches("<line").count(), 3);
}

#[test]
fn dominions_subcommand() {
    let dir = std::env::temp_dir().join("tropreg-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let pattern = dir.join("pattern.csv");
    std::fs::write(
        &pattern,
        "0,0,0,0\n0,0,0,0\n0,0,0,0\n-inf,-inf,0,0\n-inf,-inf,0,0\n-inf,-inf,0,0\n",
    )
    .unwrap();
    let out = run(&["dominions", pattern.to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["found"], serde_json::json!(true));
    assert_eq!(doc["min_dominion"], serde_json::json!([1, 2, 3]));
    assert_eq!(doc["max_dominion"], serde_json::json!([4, 5, 6]));
}

#[test]
fn project_subcommand() {
    let dir = std::env::temp_dir().join("tropreg-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let point = dir.join("point.csv");
    // the first column of fig2: projection must be exact
    std::fs::write(&point, "-3\n0\n-1\n").unwrap();
    let out = run(&[
        "project",
        testdata("fig2.csv").to_str().unwrap(),
        point.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc[0]["distance"].as_f64().unwrap(), 0.0);
}

#[test]
fn auction_round_trip() {
    let dir = std::env::temp_dir().join("tropreg-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let prices = dir.join("prices.csv");
    let winners = dir.join("winners.csv");
    let out = run(&[
        "auction",
        "simulate",
        "--factors",
        "1,0.8,0.6",
        "--tenders",
        "40",
        "--delta",
        "0.05",
        "--seed",
        "11",
        "--out",
        prices.to_str().unwrap(),
        "--winners-out",
        winners.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = run(&[
        "auction",
        "infer",
        prices.to_str().unwrap(),
        "--winners",
        winners.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    let f: Vec<f64> = doc["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(f[0], 1.0);
    assert!((f[1] - 0.8).abs() <= 0.1, "{}", f[1]);
    assert!((f[2] - 0.6).abs() <= 0.1, "{}", f[2]);
}
