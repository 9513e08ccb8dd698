use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degreelab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Writes the counts CSV of a fixture into `dir` and returns its path.
fn counts_csv(dir: &tempfile::TempDir, variety: &str, n_max: usize) -> PathBuf {
    let path = dir.path().join(format!("{variety}.csv"));
    let o = run(&[
        "count",
        "--variety",
        fixture(variety).to_str().unwrap(),
        "--n-max",
        &n_max.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn count_projective_line() {
    let o = run(&["count", "--variety", fixture("p1_f5.json").to_str().unwrap(), "--n-max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n,q_n,N_n\n1,5,6\n2,25,26\n3,125,126\n4,625,626\n");
}

#[test]
fn count_elliptic_curve() {
    let o = run(&["count", "--variety", fixture("ec_f5.json").to_str().unwrap(), "--n-max", "2"]);
    assert_eq!(stdout(&o), "n,q_n,N_n\n1,5,9\n2,25,27\n");
}

#[test]
fn malformed_variety_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"name\": ").unwrap();
    let o = run(&["count", "--variety", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "parse");
    assert_eq!(err["module"], "counting");
}

#[test]
fn guard_violation_exits_2() {
    let o = run(&["count", "--variety", fixture("p2_f3.json").to_str().unwrap(), "--n-max", "9"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "compute");
}

#[test]
fn elliptic_pipeline_passes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = counts_csv(&dir, "ec_f5.json", 8);
    let csv = csv.to_str().unwrap();

    let z = run(&["zeta", "--counts", csv]);
    assert_eq!(z.status.code(), Some(0));
    let report = json(&z);
    assert_eq!(report["genus_hint"], 1);
    let weights: Vec<i64> = report["factors"].as_array().unwrap().iter().map(|f| f["weight"].as_i64().unwrap()).collect();
    assert_eq!(weights, [0, 2, 1]);

    let w = run(&["weil", "--counts", csv]);
    assert_eq!(w.status.code(), Some(0));
    assert_eq!(json(&w)["verdict"], "PASS");

    let l = run(&["lefschetz", "--counts", csv, "--variety", fixture("ec_f5.json").to_str().unwrap()]);
    assert_eq!(l.status.code(), Some(0));
    let rows = json(&l)["rows"].as_array().unwrap().clone();
    assert!(rows[..5].iter().all(|r| r["verdict"] == "PASS"));
}

#[test]
fn projective_plane_weights() {
    let dir = tempfile::tempdir().unwrap();
    let csv = counts_csv(&dir, "p2_f3.json", 6);
    let z = run(&["zeta", "--counts", csv.to_str().unwrap()]);
    let mut weights: Vec<i64> = json(&z)["factors"].as_array().unwrap().iter().map(|f| f["weight"].as_i64().unwrap()).collect();
    weights.sort();
    assert_eq!(weights, [0, 2, 4]);
    assert_eq!(run(&["weil", "--counts", csv.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn bad_factor_fails_weil() {
    let o = run(&["weil", "--zeta", fixture("bad_factor_zeta.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["verdict"], "FAIL");
}

#[test]
fn mixed_weights_are_indeterminate() {
    let dir = tempfile::tempdir().unwrap();
    let zeta = dir.path().join("mixed.json");
    let mut z: Value = serde_json::from_str(&std::fs::read_to_string(fixture("bad_factor_zeta.json")).unwrap()).unwrap();
    z["factors"][2]["weight"] = "mixed".into();
    std::fs::write(&zeta, z.to_string()).unwrap();
    let zeta = zeta.to_str().unwrap();
    assert_eq!(run(&["weil", "--zeta", zeta]).status.code(), Some(3));
    assert_eq!(run(&["lefschetz", "--zeta", zeta]).status.code(), Some(3));
}

#[test]
fn cremona_is_unstable() {
    let o = run(&["dyndeg", "--monomial", fixture("cremona.json").to_str().unwrap(), "--iters", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["lambda1_estimate"], 1.0);
    assert_eq!(r["unstable"], true);
    assert_eq!(r["degrees"][0], "2");
    assert_eq!(r["degrees"][1], "1");
}

#[test]
fn frobenius_props_pass() {
    let o = run(&["props", "--frobenius", "q=5,k=2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("quantity,value,reference,tolerance,verdict"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 8);
    assert!(rows.iter().all(|r| r.ends_with(",PASS")), "{text}");
    let names: Vec<&str> = rows.iter().map(|r| r.split(',').next().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn lattice_dual_basis_is_exact() {
    let o = run(&["lattice", "--pairing", fixture("gram.json").to_str().unwrap(), "--dual-basis"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["dual"], serde_json::json!([["1/2", "1/2", "0", "0"], ["0", "0", "-1/2", "0"]]));
}

#[test]
fn lattice_decomposition() {
    let o = run(&["lattice", "--pairing", fixture("gram.json").to_str().unwrap(), "--decompose", "1,2,3,4"]);
    let r = json(&o);
    assert_eq!(r["x_alg"], serde_json::json!(["3/2", "3/2", "1", "0"]));
    assert_eq!(r["x_tr"], serde_json::json!(["-1/2", "1/2", "2", "4"]));
}

#[test]
fn outputs_are_byte_identical() {
    for args in [
        vec!["props", "--frobenius", "q=3,k=3"],
        vec!["dyndeg", "--model", "MODEL"],
        vec!["count", "--variety", "GENUS2", "--n-max", "6"],
    ] {
        let model = fixture("models/product_2x3.json");
        let genus2 = fixture("genus2_f3.json");
        let args: Vec<&str> = args
            .iter()
            .map(|a| match *a {
                "MODEL" => model.to_str().unwrap(),
                "GENUS2" => genus2.to_str().unwrap(),
                a => a,
            })
            .collect();
        let a = run(&args);
        let mut threaded = args.clone();
        threaded.extend(["--threads", "1"]);
        let b = run(&threaded);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["lattice", "--pairing", fixture("gram.json").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["props"]).status.code(), Some(2));
    assert_eq!(run(&["props", "--frobenius", "q=5"]).status.code(), Some(2));
}
