use std::path::Path;
use std::process::{Command, Output};

fn slicecl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slicecl"))
        .args(args)
        .env_remove("SLICECL_SEED")
        .output()
        .expect("spawn slicecl")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let a = slicecl(&["verify", "stem", "--samples", "40"]);
    let b = slicecl(&["verify", "stem", "--samples", "40"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_changes_output_and_env_matches_flag() {
    let base = slicecl(&["verify", "algebra", "--samples", "64"]);
    let flag = slicecl(&["verify", "algebra", "--samples", "64", "--seed", "7"]);
    let env = Command::new(env!("CARGO_BIN_EXE_slicecl"))
        .args(["verify", "algebra", "--samples", "64"])
        .env("SLICECL_SEED", "7")
        .output()
        .unwrap();
    assert_ne!(base.stdout, flag.stdout);
    assert_eq!(flag.stdout, env.stdout);
    let v: serde_json::Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn out_of_range_configuration_is_a_usage_error() {
    for args in [
        &["verify", "algebra", "--m", "9"][..],
        &["verify", "algebra", "--m", "0"],
        &["verify", "stem", "--samples", "0"],
        &["verify", "growth-ball", "--r-max", "1.0"],
        &["verify", "algebra", "--tol", "algebra-associativity"],
        &["envelope", "--r-grid", "0.5:0.1"],
    ] {
        let out = slicecl(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
    assert_eq!(slicecl(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn failing_check_exits_one_and_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = slicecl(&[
        "verify",
        "algebra",
        "--m",
        "2",
        "--samples",
        "16",
        "--tol",
        "algebra-associativity=0",
        "--tol",
        "algebra-inverse=0",
        "--out",
        path.to_str().unwrap(),
    ]);
    let v = read_json(&path);
    let failed: Vec<&str> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["pass"] == false)
        .map(|r| r["check"].as_str().unwrap())
        .collect();
    if failed.is_empty() {
        // every product happened to be exact in floating point
        assert_eq!(out.status.code(), Some(0));
        return;
    }
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(v["pass"], false);
    let stderr = String::from_utf8_lossy(&out.stderr);
    for c in failed {
        assert!(stderr.contains(&format!("FAIL {c}")));
    }
}

#[test]
fn polydisc_diagonal_reports_failure() {
    let out = slicecl(&["verify", "growth-domain", "--domain", "polydisc", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL growth-domain-polydisc-diagonal-rho"));
}

#[test]
fn csv_report_has_fixed_columns() {
    let out = slicecl(&["verify", "growth-ball", "--samples", "20", "--map", "cayley", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..5], ["check", "kind", "family", "map", "I"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert!(!rows.is_empty());
    let mut growth = 0;
    for row in &rows {
        assert_eq!(row.len(), header.len());
        if &row[1] == "growth" {
            assert_eq!(&row[3], "cayley");
            assert_eq!(&row[2], "convex");
            growth += 1;
        }
    }
    assert!(growth > 0);
}

#[test]
fn envelope_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("env.csv");
    let out = slicecl(&["envelope", "--map", "koebe", "--r-grid", "0:0.8:5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["r", "lower", "norm_f_minus_r", "norm_f_r", "upper"]);
    let mut count = 0;
    for row in rdr.records() {
        let v: Vec<f64> = row.unwrap().iter().map(|s| s.parse().unwrap()).collect();
        let r = v[0];
        assert!((v[1] - r / (1.0 + r).powi(2)).abs() < 1e-14);
        assert!((v[4] - r / (1.0 - r).powi(2)).abs() < 1e-12);
        // the Koebe map attains both ends of the envelope on the real axis
        assert!((v[2] - v[1]).abs() < 1e-9 * (1.0 + v[1]));
        assert!((v[3] - v[4]).abs() < 1e-9 * (1.0 + v[4]));
        count += 1;
    }
    assert_eq!(count, 5);
}
