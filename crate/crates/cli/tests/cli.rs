use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_collatz-cycles"));
    c.env_remove("COLLATZ_BIT_CAP");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json")
}

#[test]
fn simulate_one_cycle() {
    let v = json(&run(&["simulate", "739", "--cycles", "1"]));
    let c = &v["cycles"][0];
    assert_eq!(c["upper"], "3328");
    assert_eq!(c["final"], "13");
    assert_eq!(c["n"], 2);
    assert_eq!(c["alpha"], 9);
    assert_eq!(v["reached_one"], false);
}

#[test]
fn simulate_csv() {
    let out = run(&["--format", "csv", "simulate", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(
        rows,
        [
            "step_index,kind,value",
            "0,start,1",
            "1,up,4",
            "2,down,2",
            "3,down,1"
        ]
    );
}

#[test]
fn simulate_writes_trajectory_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let v = json(&run(&[
        "simulate",
        "27",
        "--log2",
        "--trajectory",
        path.to_str().unwrap(),
    ]));
    assert_eq!(v["reached_one"], true);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("step_index,kind,value,bits\n0,start,27,5\n"));
    assert_eq!(
        text.lines().count() as u64,
        v["steps"].as_u64().unwrap() + 2
    );
}

#[test]
fn decompose_encode_seed() {
    let v = json(&run(&["decompose", "739"]));
    assert_eq!(
        (v["n"].clone(), v["k_n"].clone(), v["j"].clone()),
        (2.into(), 3.into(), 2.into())
    );
    assert_eq!(v["K_O"], "5");
    assert_eq!(v["a_F"], "13");

    assert_eq!(json(&run(&["encode", "2", "3", "2", "5"])), "739");
    assert_eq!(json(&run(&["encode", "1", "2", "1", "1"])), "1");
    assert_eq!(json(&run(&["seed", "3", "3"])), "39768215");
}

#[test]
fn compose_plan_verifies() {
    let plan = r#"{"shapes":[{"n":1,"j":2,"k_n":2},{"n":1,"j":1,"k_n":4},{"n":2,"j":1,"k_n":3}],"j_delta":1}"#;
    let v = json(&run_stdin(&["compose", "-", "--verify"], plan));
    assert_eq!(v["Q"], "1173985");
    assert_eq!(v["initial"], "1221");
    assert_eq!(v["final"], "49");
    assert_eq!(v["verified"], true);
}

#[test]
fn compose_bad_q_is_a_counterexample() {
    let plan = r#"{"shapes":[{"n":1,"j":2,"k_n":2},{"n":1,"j":1,"k_n":4}],"j_delta":1,"Q":"3"}"#;
    let out = run_stdin(&["compose", "-", "--verify"], plan);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn terminal_worked_chain() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plan.json");
    std::fs::write(
        &path,
        r#"{"shapes":[{"n":1,"j":1,"k_n":2}],"n_L":1,"j_delta":3,"j_beta":3,"K_O":"1"}"#,
    )
    .unwrap();
    let v = json(&run(&["terminal", path.to_str().unwrap(), "--verify"]));
    assert_eq!(v["q_O"], "7");
    assert_eq!(v["Q"], "29");
    assert_eq!(v["b_initial"], "113");
    assert_eq!(v["b_landing"], "85");
    assert_eq!(v["converges"], true);
}

#[test]
fn parallel_split() {
    let v = json(&run(&["parallel", "57", "14", "1"]));
    assert_eq!(v["b_start"], "16441");
    assert_eq!(v["divergence"]["a"], "26");
    assert_eq!(v["divergence"]["b"], "6587");
    assert_eq!(v["divergence"]["difference"], "6561");
    assert_eq!(v["divergence"]["ups"], 8);
}

#[test]
fn verify_suite_reports_counts() {
    let v = json(&run(&["--jobs", "2", "verify", "a4"]));
    assert_eq!(v["ok"], true);
    assert!(v["cases"].as_u64().unwrap() > 500);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn seeded_suite_is_reproducible() {
    let a = run(&["--seed", "7", "verify", "parallel", "--samples", "20"]);
    let b = run(&["--seed", "7", "verify", "parallel", "--samples", "20"]);
    assert_eq!(json(&a), json(&b));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["verify", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "10"]).status.code(), Some(2));
    assert_eq!(run(&["decompose", "x"]).status.code(), Some(2));
    assert_eq!(
        run(&["--format", "csv", "decompose", "7"]).status.code(),
        Some(2)
    );
    assert_eq!(run_stdin(&["compose", "-"], "{").status.code(), Some(2));
}

#[test]
fn caps_exit_3() {
    assert_eq!(
        run(&["--bit-cap", "8", "simulate", "27"]).status.code(),
        Some(3)
    );
    assert_eq!(
        run(&["--step-cap", "5", "simulate", "27"]).status.code(),
        Some(3)
    );
    let out = bin()
        .env("COLLATZ_BIT_CAP", "8")
        .args(["simulate", "27"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
