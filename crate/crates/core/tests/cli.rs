use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use weighted_entropy::gof::CriticalTable;

fn wentropy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wentropy"))
        .args(args)
        .env_remove("WENTROPY_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn entropy_exponential_closed_form() {
    let out = wentropy(&["entropy", "--dist", "exp(1)"]);
    assert!(out.status.success());
    let v = json(&out);
    // 1/(gamma^2) with gamma = 0.51
    let expected = (1.0f64 / (0.51 * 0.51)).ln() / 0.99;
    assert!((v["value"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert_eq!(v["measure"], "GWSE");
    assert_eq!(v["method"], "closed-form");
}

#[test]
fn dynamic_csv_has_one_row_per_t() {
    let out = wentropy(&["--format", "csv", "dynamic", "--dist", "exp(2)", "--t", "0,0.5,1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,value");
    assert_eq!(lines.len(), 4);
}

#[test]
fn critical_table_out_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.csv");
    let base = ["critical-table", "--n", "5:8", "--B", "300", "--seed", "9"];
    for (path, workers) in [(&a, "1"), (&b, "4"), (&c, "2")] {
        let mut args = base.to_vec();
        args.extend(["--workers", workers, "--out", path.to_str().unwrap()]);
        let out = wentropy(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let from_json = CriticalTable::read(&a).unwrap();
    let from_csv = CriticalTable::read(&c).unwrap();
    assert_eq!(from_json, from_csv);
    assert_eq!(from_json.sample_sizes(), vec![5, 6, 7, 8]);
}

#[test]
fn gof_test_with_table_and_csv_column() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.json");
    let out = wentropy(&["critical-table", "--n", "6", "--B", "200", "--out", table.to_str().unwrap()]);
    assert!(out.status.success());
    let data = dir.path().join("d.csv");
    fs::write(&data, "id,life\n1,0.4\n2,1.9\n3,0.2\n4,3.1\n5,0.8\n6,1.1\n").unwrap();
    let out = wentropy(&[
        "gof-test", "--data", data.to_str().unwrap(), "--column", "life",
        "--table", table.to_str().unwrap(), "--no-simulate", "--B", "200",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["n"], 6);
    let t = v["T"].as_f64().unwrap();
    let crit = v["critical_value"].as_f64().unwrap();
    let table = CriticalTable::read(&table).unwrap();
    assert_eq!(crit, table.get(6, 0.05).unwrap());
    let expected = if t < crit { "reject" } else { "fail_to_reject" };
    assert_eq!(v["decision"].as_str().unwrap(), expected);
}

#[test]
fn invalid_order_reports_json_error() {
    let out = wentropy(&["entropy", "--dist", "exp(1)", "--alpha", "2", "--beta", "1.2"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "invalid_order");
}

#[test]
fn divergent_pareto_and_bad_args() {
    let out = wentropy(&["entropy", "--dist", "pareto(0.5,1)"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "divergent_integral");
    assert_eq!(wentropy(&["entropy", "--bogus"]).status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let out = wentropy(&["verify", "--draws", "5"]);
    assert!(out.status.success());
    let v = json(&out);
    let cells = v["cells"].as_array().unwrap();
    assert!(!cells.is_empty());
    assert!(cells.iter().all(|c| c["pass"] == true));
}
