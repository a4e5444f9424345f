use std::process::{Command, Output};

use serde_json::Value;

fn cfrow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfrow")).args(args).env_remove("CFROW_SEED").output().unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let out = cfrow(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn expand_kinds() {
    let v = json_of(&["expand", "--kind", "rcf", "--x", "sqrt(2)-1", "--n", "5"]);
    assert_eq!(v["cf"], "[0;2,2,2,2,2]");
    let v = json_of(&["expand", "--kind", "farey", "--x", "phi-frac", "--n", "6"]);
    let ds = v["digits"].as_array().unwrap();
    assert_eq!(ds[0], serde_json::json!([1, 0]));
    assert!(ds[1..].iter().all(|d| d == &serde_json::json!([1, 1])));
    let v = json_of(&["expand", "--kind", "alpha", "--alpha", "1/2", "--x", "phi-frac", "--n", "6"]);
    let (ds, signs) = (v["digits"].as_array().unwrap(), v["signs"].as_array().unwrap());
    assert_eq!(v["a0"], 1);
    assert_eq!(ds.len(), 6);
    assert!(ds.iter().all(|d| d == 3));
    assert!(signs.iter().all(|s| s == -1));
}

#[test]
fn contract_example_and_bad_plan() {
    let gcf = r#"{"alpha":[1,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15],"beta":[1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16]}"#;
    let v = json_of(&["contract", "--gcf", gcf, "--plan", "0,2,4,6,8,10,12,14"]);
    let want = serde_json::json!([[1, 1], [3, 8], [-30, 87], [-420, 275], [-1890, 623], [-5544, 1179], [-12870, 1991], [-25740, 3107]]);
    assert_eq!(v["digits"], want);
    assert_eq!(v["scalars"], serde_json::json!([1, 1, 3, 15, 105, 945, 10395, 135135]));
    assert_eq!(v["seidel"], true);
    let bad = cfrow(&["contract", "--gcf", gcf, "--plan", "3,2"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("strictly increasing"));
}

#[test]
fn cfe_h1_gives_rcf() {
    let v = json_of(&["cfe", "--region", "h1", "--x", "sqrt(2)-1", "--digits", "10"]);
    let ds = v["digits"].as_array().unwrap();
    assert_eq!(ds.len(), 10);
    assert_eq!(ds[0], serde_json::json!([1, 0]));
    assert!(ds[1..].iter().all(|d| d == &serde_json::json!([1, 2])));
}

#[test]
fn entropy_h1() {
    let v = json_of(&["entropy", "--region", "h1", "--tol", "1e-6"]);
    assert!((v["measure"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-6);
    assert!((v["entropy"].as_f64().unwrap() - 2.373138).abs() < 1e-5);
}

#[test]
fn orbit_csv_rows() {
    let dir = std::env::temp_dir().join(format!("cfrow-orbit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.csv");
    let out = cfrow(&["orbit", "--region", "alpha:1/4", "--x", "sqrt(3)-1", "--n", "50", "--csv", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_path(&path).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["n", "x_lo", "x_hi", "y_lo", "y_hi", "cell_a", "cell_b"]);
    assert_eq!(r.records().count(), 50);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn region_info_and_domain_errors() {
    let v = json_of(&["region-info", "--region", "vh:2,1"]);
    assert_eq!(v["name"], "vh:2,1");
    assert_eq!(cfrow(&["region-info", "--region", "bogus"]).status.code(), Some(2));
    assert_eq!(cfrow(&["cfe", "--region", "h1", "--x", "3/2"]).status.code(), Some(2));
    assert_eq!(cfrow(&["entropy", "--region", "omega"]).status.code(), Some(2));
}

#[test]
fn sweep_is_seeded_and_stable() {
    let args = ["sweep-alpha", "--from", "1/2", "--to", "1", "--steps", "2", "--samples", "2000", "--seed", "9"];
    let a = cfrow(&args);
    let b = cfrow(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# samples=2000 seed=9"));
    assert_eq!(lines.next(), Some("alpha,measure,measure_err,entropy,entropy_err,seed"));
    assert_eq!(lines.count(), 3);
    let env = Command::new(env!("CARGO_BIN_EXE_cfrow"))
        .args(&args[..args.len() - 2])
        .env("CFROW_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(env.stdout, text.as_bytes());
}
