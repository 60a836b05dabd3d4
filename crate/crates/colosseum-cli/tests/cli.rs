use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colosseum")).args(args).output().expect("spawn colosseum")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("colosseum-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn verify_reports_validity_and_probability() {
    let out = run(&["verify", "--n", "1", "--cliffords", "H", "--paulis", "X"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["valid"], true);
    assert_eq!(v["result"]["probability"], "1/2");
    assert_eq!(v["config"]["command"], "verify");
    assert!(v["version"].is_string());
}

#[test]
fn failed_expectation_exits_with_one() {
    let out = run(&["verify", "--cliffords", "H", "--paulis", "X", "--expect-valid", "false"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(run(&["verify", "--cliffords", "Q", "--paulis", "X"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--n", "2", "--cliffords", "H", "--paulis", "X"]).status.code(), Some(2));
    assert_eq!(run(&["threshold-scan", "--seed", "1", "--p", "2.0"]).status.code(), Some(2));
    assert_eq!(run(&["restrictions", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn brute_force_games_give_eight_ninths() {
    let out = run(&["games", "--brute-force", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["magic_square_classical_value"], "8/9");
    assert_eq!(v["result"]["quantum_wins_on_support"], true);
    assert_eq!(v["result"]["every_strategy_pair_has_zero_trace_witness"], true);
}

#[test]
fn samples_lie_in_the_relation() {
    let out = run(&["sample", "--cliffords", "H,S,HS", "--shots", "50", "--seed", "4", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 50);
    assert!(text.lines().all(|l| l.len() == 3));
    let circuit = run(&["sample", "--cliffords", "H,S,HS", "--shots", "20", "--seed", "4", "--method", "circuit", "--check"]);
    assert_eq!(circuit.status.code(), Some(0));
}

#[test]
fn distribution_sums_to_one() {
    let out = run(&["distribution", "--cliffords", "H,S"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let total: f64 = v["result"]
        .as_object()
        .unwrap()
        .values()
        .map(|p| {
            let s = p.as_str().unwrap();
            match s.split_once('/') {
                Some((a, b)) => a.parse::<f64>().unwrap() / b.parse::<f64>().unwrap(),
                None => s.parse().unwrap(),
            }
        })
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn threshold_scan_replays_byte_identically() {
    let args = ["threshold-scan", "--n", "2", "--d", "3", "--p", "1e-3,1e-2", "--trials", "300", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("n,d,p,trials,successes,rate,wilson_lo,wilson_hi,seed"));
    assert_eq!(text.lines().count(), 3);
    let other = run(&["threshold-scan", "--n", "2", "--d", "3", "--p", "1e-3,1e-2", "--trials", "300", "--seed", "12"]);
    assert_ne!(String::from_utf8(other.stdout).unwrap(), text);
}

#[test]
fn config_file_matches_command_line() {
    let path = scratch("scan.json");
    std::fs::write(&path, r#"{"schema": 1, "command": "threshold-scan", "n": 2, "d": [3], "p": "1e-3,1e-2", "trials": "300", "seed": 11}"#)
        .unwrap();
    let via_config = run(&["run", "--config", path.to_str().unwrap()]);
    let direct = run(&["threshold-scan", "--n", "2", "--d", "3", "--p", "1e-3,1e-2", "--trials", "300", "--seed", "11"]);
    assert_eq!(via_config.status.code(), Some(0));
    assert_eq!(via_config.stdout, direct.stdout);

    std::fs::write(&path, r#"{"schema": 9, "command": "games"}"#).unwrap();
    assert_eq!(run(&["run", "--config", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn stretched_layout_fails_locality() {
    assert_eq!(run(&["locality-check"]).status.code(), Some(0));
    let out = run(&["locality-check", "--delta-out", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["pass"], false);
}

#[test]
fn restriction_statistics_match_the_binomial_mean() {
    let out = run(&["restrictions", "--n", "20", "--p-star", "0.8", "--runs", "400", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["bound_violations"], 0);
}

#[test]
fn adversary_rates_stay_below_the_ceiling() {
    let out = run(&["adversary", "--n", "8", "--dags", "4", "--trials", "4000", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    let survey = run(&["adversary", "--survey", "--n", "1024", "--dags", "20", "--seed", "1"]);
    assert_eq!(survey.status.code(), Some(0));
    assert_eq!(json(&survey)["result"]["with_pair"], 20);
}

#[test]
fn adversary_reads_a_circuit_file() {
    // Identity wiring: output bit i copies input bit i, so P_j depends on block j only.
    let n = 2;
    let gates: Vec<Value> = (0..2 * n).map(|i| serde_json::json!({"inputs": [i], "table": 2})).collect();
    let outputs: Vec<usize> = (0..2 * n).map(|g| 5 * n + g).collect();
    let dag = serde_json::json!({"n_in": 5 * n, "fan_in": 1, "gates": gates, "outputs": outputs});
    let path = scratch("dag.json");
    std::fs::write(&path, dag.to_string()).unwrap();
    let out = run(&["adversary", "--dag", path.to_str().unwrap(), "--trials", "2000", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}
