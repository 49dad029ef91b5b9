use std::process::{Command, Output};

use serde_json::Value;
use surftrace_core::exactnum::rat;
use surftrace_core::RatFuncN;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surftrace"))
        .arg("--reproducible")
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("one JSON document")
}

fn lines(args: &[&str]) -> Vec<Value> {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn dehn_reports_the_shortened_word() {
    let v = json(&["dehn", "--g", "2", "--word", "abABc"]);
    assert_eq!(v["word"], "c");
    assert_eq!(v["length"], 1);
    assert_eq!(v["shortest"], true);
}

#[test]
fn word_integral_round_trips() {
    let v = json(&["word-integral", "--r", "2", "--word", "abAB", "--json"]);
    assert!(v["degree"].as_i64().unwrap() <= 0);
    let value: RatFuncN = serde_json::from_value(v["value"].clone()).unwrap();
    assert_eq!(
        value,
        RatFuncN::from_rat(rat(1, 1))
            .checked_div(&RatFuncN::var())
            .unwrap()
    );
}

#[test]
fn chi_check_streams_records_and_a_summary() {
    let v = lines(&["chi-check", "--word", "abAB", "--k", "1", "--l", "0"]);
    assert_eq!(v.len(), 5);
    for r in &v[..4] {
        assert!(r["chi"].as_i64().unwrap() <= -1);
        assert_eq!(r["boundary_powers"], serde_json::json!([1]));
    }
    let s = &v[4];
    assert_eq!(s["count"], 4);
    assert!(s["max_chi"].as_i64().unwrap() <= -1);
    assert_eq!(s["bound_violations"], 0);
    assert_eq!(s["piece_violations"], 0);
}

#[test]
fn chi_check_dumps_the_annulus() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let v = lines(&[
        "chi-check",
        "--word",
        "abABcdCD",
        "--k",
        "0",
        "--l",
        "1",
        "--no-pieces",
        "--dump-dir",
        d,
    ]);
    let s = v.last().unwrap();
    assert_eq!(s["max_chi"], 0);
    assert!(s["bound_violations"].as_u64().unwrap() > 0);
    let dump = std::fs::read_to_string(dir.path().join("first-violation.json")).unwrap();
    serde_json::from_str::<Value>(&dump).unwrap();
}

#[test]
fn surface_trace_agrees_with_the_oracle() {
    let v = json(&[
        "surface-trace",
        "--word",
        "abAB",
        "--mu",
        "1",
        "--oracle-check",
        "3,4,5",
    ]);
    assert_eq!(v["oracle"]["agree"], true);
    assert_eq!(v["oracle"]["points"][0]["matching"], "1/18");
    let dj: RatFuncN = serde_json::from_value(v["result"]["dj"].clone()).unwrap();
    assert!(dj.degree_at_most(0));
}

#[test]
fn guard_refusal_and_bad_input_exit_codes() {
    let out = run(&["surface-trace", "--word", "abcdABCD", "--mu", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let out = run(&["dehn", "--word", "abAx"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "--cost-limit",
        "10",
        "surface-trace",
        "--word",
        "abAB",
        "--mu",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "--unsafe",
        "--cost-limit",
        "10",
        "surface-trace",
        "--word",
        "abAB",
        "--mu",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn monte_carlo_output_is_independent_of_threads() {
    let base = [
        "mc",
        "--word",
        "abAB",
        "--n",
        "3",
        "--samples",
        "3000",
        "--seed",
        "5",
        "--nu",
        "1",
    ];
    let a = run(&[&["--threads", "1"], &base[..]].concat());
    let b = Command::new(env!("CARGO_BIN_EXE_surftrace"))
        .args(["--reproducible", "--threads", "3"])
        .args(base)
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "word = \"abAB\"\nmu = \"1\"\nn = [3, 4]\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["--config", p, "dims"]);
    assert_eq!(v["label"], "[(1), ()]");
    assert_eq!(v["values"][1]["dim"], "4/1");
    let v = json(&["--config", p, "dims", "--mu", "", "--nu", "1", "--n", "7"]);
    assert_eq!(v["label"], "[(), (1)]");
    assert_eq!(v["values"][0]["dim"], "7/1");
    std::fs::write(&path, "colour = 1\n").unwrap();
    assert_eq!(run(&["--config", p, "dims"]).status.code(), Some(1));
}

#[test]
fn csv_rows_per_class() {
    let out = run(&["--format", "csv", "wg", "--k", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], "k,coefficients.coeff,coefficients.cycle_type");
    assert!(rows[1].contains("(2) / (n^5 - 5*n^3 + 4*n)"));
}

#[test]
fn remaining_subcommands() {
    let v = json(&["zeta", "--s", "2", "--n", "2", "--max-boxes", "0"]);
    assert_eq!(v["value"], "1/1");
    let v = json(&["ztheta", "--mu", "1", "--nu", "1"]);
    assert_eq!(v["z"].as_object().unwrap().len(), 2);
    let v = json(&[
        "expected-trace",
        "--word",
        "abAB",
        "--max-boxes",
        "1",
        "--n0",
        "4",
    ]);
    assert!(v["heuristic"].as_str().unwrap().starts_with("heuristic"));
    assert_eq!(v["terms"].as_array().unwrap().len(), 2);
    let v = json(&["wg", "--k", "2", "--cycle-type", "2"]);
    assert_eq!(v["coefficients"][0]["coeff"]["text"], "(-1) / (n^3 - n)");
    let timed = run(&["zeta", "--s", "2", "--n", "2", "--max-boxes", "0"]);
    let untimed = Command::new(env!("CARGO_BIN_EXE_surftrace"))
        .args(["zeta", "--s", "2", "--n", "2", "--max-boxes", "0"])
        .output()
        .unwrap();
    assert_ne!(timed.stdout, untimed.stdout);
}
