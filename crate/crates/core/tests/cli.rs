//! The command-line contract, exercised through the built binary.

use std::process::{Command, Output};

use serde_json::Value;

fn zoo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-zoo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("valid JSON")
}

#[test]
fn eval_examples() {
    // N = {n : n mod 4 in {2, 3}} contains 2, so f(p^2) = p^4
    let o = zoo(&["--prime", "5", "eval", "spikes", "p^2", "--k", "2", "--bit", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "1 * p^4");
    let o = zoo(&["eval", "pair-truncation", "0"]);
    assert_eq!((code(&o), stdout(&o).trim().to_string()), (0, "0".to_string()));
    let o = zoo(&["--prime", "3", "eval", "pair-truncation", "1/(1-p)", "--format", "json", "--precision", "20"]);
    let v = json(&o);
    assert_eq!(v["precision"], 20);
    assert_eq!(v["exact"], false);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&zoo(&["eval", "spikes", "1 2 *"])), 2);
    assert_eq!(code(&zoo(&["eval", "spikes", "p^"])), 2);
    assert_eq!(code(&zoo(&["--prime", "4", "list"])), 2);
    assert_eq!(code(&zoo(&["eval", "pair-truncation", "0 (mod p^1)"])), 3);
    assert_eq!(code(&zoo(&["--help"])), 0);
    // a claim that fails: alpha = 1 keeps |a_n| n bounded, so the Lipschitz failure is not seen
    let o = zoo(&["verify", "log-ladder", "lip-fails", "--alpha", "1", "--n-max", "200"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("FAIL"));
}

#[test]
fn verify_examples() {
    let o = zoo(&["--prime", "5", "--format", "json", "verify", "spikes", "strict-fail", "--k", "3", "--steps", "12"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["passed"], true);
    assert_eq!(v["config"]["precision"], 64);
    let o = zoo(&["--prime", "3", "verify", "binomial-scale", "unbounded-derivative", "--beta", "2", "--steps", "10"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = zoo(&["--format", "json", "--seed", "11", "verify", "haar", "E-prefix", "--pairs", "10", "--samples", "100000"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["config"]["seed"], 11);
}

fn table_rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn table_examples() {
    let o = zoo(&["--format", "csv", "table", "log-ladder", "--criterion", "lip", "--alpha", "2", "--sigma", "--n-max", "10000"]);
    assert_eq!(code(&o), 0);
    let rows = table_rows(&o);
    assert_eq!(rows.len(), 10_001);
    let sup: f64 = rows.last().unwrap()[5].parse().unwrap_or(f64::INFINITY);
    assert!(sup > 100.0);

    let o = zoo(&["--format", "csv", "table", "log-ladder", "--criterion", "n1", "--sigma", "--n-max", "2000"]);
    let max = table_rows(&o)
        .iter()
        .map(|r| r[3].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(max <= 2.0, "max |a_n| n = {max}");

    let o = zoo(&["--format", "csv", "table", "zero", "--n-max", "50"]);
    assert!(table_rows(&o).iter().all(|r| r[1..].iter().all(|c| c == "0")));
}

#[test]
fn out_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("padic-zoo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("haar.json");
    let o = zoo(&[
        "--format", "json", "--out", path.to_str().unwrap(), "haar", "--samples", "5000", "--pairs", "3",
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["reports"].as_array().unwrap().len(), 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn list_names_every_entry() {
    let o = zoo(&["--format", "json", "list"]);
    let names: Vec<String> = json(&o)["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(names, padic_zoo::zoo::NAMES);
}
