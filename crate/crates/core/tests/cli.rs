use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn rpade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpade")).args(args).output().expect("rpade runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn solve_reports_certified_value() {
    let out = rpade(&["solve", "--coeffs", "1,1", "--seed", "1.4", "--digits", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["certified_digits"].as_u64().unwrap() >= 20);
    assert!(v["value_re"].as_str().unwrap().starts_with("1.3923516415302918556"));
    assert_eq!(v["value_im"].as_str().unwrap(), "0");
    assert!(v["D_final"].as_u64().unwrap() <= 120);
    assert!(!v["diffs"].as_array().unwrap().is_empty());
}

#[test]
fn output_is_deterministic() {
    let args = ["solve", "--coeffs", "1,-1/10", "--seed", "0.9-0.007i", "--digits", "12"];
    let a = rpade(&args);
    let b = rpade(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verbose_goes_to_stderr_only() {
    let args = ["solve", "--coeffs", "1,1", "--seed", "1.4", "--digits", "10"];
    let quiet = rpade(&args);
    let mut loud_args = args.to_vec();
    loud_args.push("--verbose");
    let loud = rpade(&loud_args);
    assert_eq!(quiet.stdout, loud.stdout);
    assert!(!loud.stderr.is_empty());
}

#[test]
fn exit_codes() {
    let bad_number = rpade(&["solve", "--coeffs", "1,x", "--seed", "1"]);
    assert_eq!(bad_number.status.code(), Some(2));
    let unconverged = rpade(&["solve", "--coeffs", "1,1", "--seed", "1.4", "--digits", "30", "--d-max", "4"]);
    assert_eq!(unconverged.status.code(), Some(3));
    assert_eq!(json(&unconverged)["D_final"], 4);
    let capped = rpade(&["solve", "--coeffs", "1,1", "--seed", "1.4", "--digits", "20", "--max-bits", "128"]);
    assert_eq!(capped.status.code(), Some(4));
    let missing = rpade(&["solve", "--seed", "1"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# budget\ndigits = 30\nd_max = 4").unwrap();
    let path = file.path().to_str().unwrap();
    let from_config = rpade(&["--config", path, "solve", "--coeffs", "1,1", "--seed", "1.4"]);
    assert_eq!(from_config.status.code(), Some(3));
    let overridden = rpade(&["--config", path, "solve", "--coeffs", "1,1", "--seed", "1.4", "--d-max", "40"]);
    assert_eq!(overridden.status.code(), Some(0));
    assert!(json(&overridden)["certified_digits"].as_u64().unwrap() >= 30);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "colour = blue").unwrap();
    let out = rpade(&["--config", bad.path().to_str().unwrap(), "solve", "--coeffs", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_grid_prints_only_the_header() {
    let out = rpade(&["scan-g", "--g", ""]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "g,E_bs,ReE_res,ImE_res_abs,scaled_width,gap\n");
}

#[test]
fn scan_row_columns() {
    let out = rpade(&["scan-g", "--g", "0.3", "--digits", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 6);
    assert_eq!(row[0], "0.3");
    assert!(row[1].starts_with("0.79167251"));
    assert!(row[2].starts_with("0.81560795"));
    assert!(row[3].starts_with("0.0294002168"));
}

#[test]
fn slope_of_the_test_sequence() {
    let out = rpade(&["slope", "--test-sequence", "--d-min", "5", "--d-max", "25"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["b"].as_f64().unwrap() + 2.0).abs() < 1e-9);
    assert_eq!(v["fit_range"], serde_json::json!([16, 25]));
}

#[test]
fn symbolic_formats() {
    let text = rpade(&["symbolic", "--model", "V1", "--dimension", "2", "--format", "text"]);
    assert_eq!(text.status.code(), Some(0));
    assert!(stdout(&text).contains("(1/4725)*(E + 2)*(E^5 - 2*E^4 - 23*E^3 - 602*E^2 + 1030*E - 1412)"));

    let v = json(&rpade(&["symbolic", "--model", "V2", "--dimension", "2"]));
    assert_eq!(v["prefactor"]["den"], "4465125");
    assert_eq!(v["deflation"]["exact"], true);
    assert_eq!(v["deflation"]["root"], "-9");

    let plain = json(&rpade(&["symbolic", "--coeffs", "1", "--dimension", "2", "--root", "none"]));
    assert!(plain["deflation"].is_null());

    assert_eq!(rpade(&["symbolic", "--model", "V1", "--dimension", "2", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(rpade(&["symbolic", "--model", "V1", "--dimension", "5"]).status.code(), Some(2));
    assert_eq!(rpade(&["symbolic", "--model", "V9", "--dimension", "2"]).status.code(), Some(2));
}
