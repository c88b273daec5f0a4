use std::process::{Command, Output};

use serde_json::Value;

fn bethe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bethe")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn solve_matches_ed() {
    let s = json(&bethe(&["solve", "--gamma", "0.5pi", "--L", "8", "--ground"]));
    let e = json(&bethe(&["ed", "--gamma", "0.5pi", "--L", "8", "--M", "4"]));
    let bethe_total = s["observables"]["total_energy"].as_f64().unwrap();
    let lowest = e["spectrum"]["eigenvalues"][0].as_f64().unwrap();
    assert!((bethe_total - lowest).abs() < 1e-10);
    assert!(s["residual"].as_f64().unwrap() < 1e-12);
    for key in ["params", "numbers", "roots", "predictions", "deltas"] {
        assert!(s.get(key).is_some(), "{key}");
    }
}

#[test]
fn odd_length_is_a_config_error() {
    let out = bethe(&["solve", "--gamma", "0.5pi", "--L", "7", "--ground"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("L must be even"));
}

#[test]
fn explicit_numbers_equal_ground() {
    let a = bethe(&["solve", "--gamma", "0.5pi", "--L", "8", "--ground"]);
    let b = bethe(&["solve", "--gamma", "0.5pi", "--L", "8", "--numbers", "-3,-1,1,3"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn nonconvergence_exits_3() {
    let out = bethe(&["solve", "--gamma", "0.55pi", "--L", "64", "--ground", "--phi", "0.1", "--max-iter", "1"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn bad_gamma_is_a_config_error() {
    let out = bethe(&["solve", "--gamma", "half", "--L", "8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ground_scan_recovers_unit_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    let fit = dir.path().join("fit.json");
    let plot = dir.path().join("plot.dat");
    let out = bethe(&[
        "scan",
        "--gamma",
        "0.55pi",
        "--ground",
        "--doubling",
        "64:512",
        "--fit",
        fit.to_str().unwrap(),
        "--plot-data",
        plot.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("L,e_L,e_pred,a_L,P_L,P_pred"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "64");
    // 17 significant digits: d.dddddddddddddddde±x
    assert_eq!(row[1].split('e').next().unwrap().trim_start_matches('-').len(), 18);
    assert_eq!(csv.lines().count(), 5);

    let f: Value = serde_json::from_str(&std::fs::read_to_string(&fit).unwrap()).unwrap();
    let x = f["fit"]["x_eff"].as_f64().unwrap();
    assert!((x - 1.0).abs() < 1e-3, "{x}");
    assert_eq!(std::fs::read_to_string(&plot).unwrap().lines().count(), 4);
}

#[test]
fn scan_is_byte_identical_across_runs() {
    let args = ["scan", "--gamma", "3/7pi", "--n-plus", "1", "--n-minus", "1", "--L", "64,128,256", "--phi", "0.05"];
    let (a, b) = (bethe(&args), bethe(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn predict_only_leaves_measured_columns_empty() {
    let out = bethe(&["scan", "--gamma", "0.55pi", "--ground", "--L", "64,128", "--predict-only"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 6);
    assert!(row[1].is_empty() && row[3].is_empty() && row[4].is_empty());
    assert!(!row[2].is_empty() && !row[5].is_empty());
}

#[test]
fn scan_rejects_lengths_off_the_template() {
    let out = bethe(&["scan", "--gamma", "0.55pi", "--ground", "--L", "64,130"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("130"));
}

#[test]
fn character_table() {
    let out = bethe(&["char", "--m", "2", "--kmax", "5"]);
    assert!(out.status.success());
    let p: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(p, ["1", "1", "2", "2", "3", "3"]);
}

#[test]
fn verify_all_passes() {
    let v = json(&bethe(&["verify", "--all", "--L", "1024"]));
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_reports_breaches() {
    // below π/2 a closer zero of 1 + r̂' dominates the test-function remainder
    let out = bethe(&["verify", "--wl", "--gamma", "0.9", "--L", "256"]);
    assert_eq!(out.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], Value::Bool(false));
}

#[test]
fn config_file_drives_solve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"gamma": "pi/3", "phi": 0.1, "L": 16, "state": "ground"}"#).unwrap();
    let a = json(&bethe(&["solve", "--config", cfg.to_str().unwrap()]));
    let b = json(&bethe(&["solve", "--gamma", "pi/3", "--phi", "0.1", "--L", "16", "--ground"]));
    assert_eq!(a, b);
    std::fs::write(&cfg, r#"{"gamma": "pi/3", "bogus": 1}"#).unwrap();
    assert_eq!(bethe(&["solve", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn ed_match_with_effective_twist() {
    // n₊ = 1, n₋ = 0 at L = 8 has M = 3; zero effective twist is Hamiltonian twist -1/2
    let v = json(&bethe(&[
        "ed",
        "--gamma",
        "0.55pi",
        "--L",
        "8",
        "--M",
        "3",
        "--n-plus",
        "1",
        "--effective-twist",
        "--match",
    ]));
    assert_eq!(v["phi"].as_f64(), Some(-0.5));
    assert_eq!(v["match"]["entries"][0]["matched"], Value::Bool(true));
}

#[test]
fn predict_needs_no_solve() {
    let v = json(&bethe(&["predict", "--gamma", "0.55pi", "--L", "64,128", "--ground"]));
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    assert!((arr[0]["prediction"]["x_eff"].as_f64().unwrap() - 1.0).abs() < 1e-15);
}
