//! End-to-end tests of the `asqkd` binary: flag handling, config layering,
//! output formats, exit codes, and determinism of written files.

use std::path::Path;
use std::process::{Command, Output};

fn asqkd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asqkd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn run_honest_summary() {
    let out = asqkd(&[
        "run", "--attack", "honest", "--trials", "200", "--seed", "7",
    ]);
    let summary = stdout_json(&out);
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["command"], "run");
    assert_eq!(summary["config"]["n"], 8);
    assert_eq!(summary["config"]["attack"], "honest");
    assert_eq!(summary["stats"]["detection_rate"], 0.0);
    assert_eq!(summary["stats"]["key_agreement_rate"], 1.0);
    assert_eq!(summary["stats"]["recycled_rate"], 1.0);
}

#[test]
fn run_writes_byte_identical_reports_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path_a = dir.path().join("a.json");
    let path_b = dir.path().join("b.json");
    for (path, _) in [(&path_a, 0), (&path_b, 1)] {
        let out = asqkd(&[
            "run",
            "--attack",
            "intercept-z",
            "--p-attack",
            "0.4",
            "--trials",
            "300",
            "--seed",
            "99",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let a = std::fs::read(&path_a).unwrap();
    let b = std::fs::read(&path_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn run_emits_per_trial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trials.csv");
    let out = asqkd(&[
        "run",
        "--trials",
        "25",
        "--seed",
        "3",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    // Summary still lands on stdout.
    let summary = stdout_json(&out);
    assert_eq!(summary["stats"]["trials"], 25);
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial_index,alice_pass,bob_pass,key_match,recycled"
    );
    assert_eq!(lines.clone().count(), 25);
    assert!(lines.all(|l| l.ends_with(",1,1,1,1"))); // honest default attack
}

#[test]
fn invalid_inputs_exit_2() {
    // Unknown attack name (clap rejects the value).
    let out = asqkd(&["run", "--attack", "quantum-zeno"]);
    assert_eq!(out.status.code(), Some(2));

    // bitflip without slots.
    let out = asqkd(&["run", "--attack", "bitflip"]);
    assert_eq!(out.status.code(), Some(2));

    // slot out of range.
    let out = asqkd(&[
        "run", "--attack", "bitflip", "--slots", "99", "--n", "2", "--m", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // p-attack out of range.
    let out = asqkd(&["run", "--attack", "intercept-z", "--p-attack", "1.5"]);
    assert_eq!(out.status.code(), Some(2));

    // zero trials.
    let out = asqkd(&["run", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let out = asqkd(&[
        "run",
        "--trials",
        "5",
        "--out",
        "/nonexistent-dir/report.json",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_layering_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("session.conf");
    std::fs::write(
        &config_path,
        "# sweep defaults\nn=4\nm=4\ntrials=50\nseed=5\nattack=intercept-z\np-attack=1.0\n",
    )
    .unwrap();

    // File values apply...
    let out = asqkd(&["run", "--config", config_path.to_str().unwrap()]);
    let summary = stdout_json(&out);
    assert_eq!(summary["config"]["n"], 4);
    assert_eq!(summary["config"]["attack"], "intercept-z");
    assert_eq!(summary["config"]["p_attack"], 1.0);

    // ...and explicit flags win over them.
    let out = asqkd(&[
        "run",
        "--config",
        config_path.to_str().unwrap(),
        "--attack",
        "honest",
        "--n",
        "6",
    ]);
    let summary = stdout_json(&out);
    assert_eq!(summary["config"]["n"], 6);
    assert_eq!(summary["config"]["m"], 4);
    assert_eq!(summary["config"]["attack"], "honest");
    assert_eq!(summary["stats"]["detection_rate"], 0.0);
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.conf");
    std::fs::write(&config_path, "qubits=9\n").unwrap();
    let out = asqkd(&["run", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_over_p_attack_is_monotone() {
    let out = asqkd(&[
        "sweep",
        "--vary",
        "p-attack",
        "--values",
        "0,0.5,1",
        "--attack",
        "intercept-z",
        "--trials",
        "800",
        "--seed",
        "11",
    ]);
    let summary = stdout_json(&out);
    assert_eq!(summary["vary"], "p-attack");
    let rows = summary["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let rates: Vec<f64> = rows
        .iter()
        .map(|r| r["detection_rate"].as_f64().unwrap())
        .collect();
    assert_eq!(rates[0], 0.0);
    // Stochastic dominance with 3σ slack.
    let slack = 3.0 * (0.25f64 / 800.0).sqrt() * 2.0;
    assert!(rates[1] > rates[0]);
    assert!(rates[2] + slack > rates[1]);
}

#[test]
fn sweep_over_size_keeps_efficiency_constant() {
    let out = asqkd(&[
        "sweep", "--vary", "size", "--values", "4,8,16", "--trials", "40", "--seed", "2",
    ]);
    let summary = stdout_json(&out);
    for row in summary["rows"].as_array().unwrap() {
        assert_eq!(row["qubit_efficiency"], "1/6");
        assert_eq!(row["n"], row["m"]);
    }
}

#[test]
fn sweep_rejects_empty_values_and_unknown_parameters() {
    let out = asqkd(&["sweep", "--vary", "n", "--values", ""]);
    assert_eq!(out.status.code(), Some(2));
    let out = asqkd(&["sweep", "--vary", "temperature", "--values", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
    // p-attack is meaningful only for intercept attacks.
    let out = asqkd(&[
        "sweep", "--vary", "p-attack", "--values", "0.5", "--attack", "bitflip", "--slots", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_over_epsilon_reports_a_monotone_frontier() {
    let out = asqkd(&[
        "sweep",
        "--vary",
        "epsilon",
        "--values",
        "0,1",
        "--restarts",
        "2",
        "--max-iters",
        "6",
        "--ancilla",
        "1",
        "--seed",
        "4",
    ]);
    let summary = stdout_json(&out);
    assert_eq!(summary["vary"], "epsilon");
    let rows = summary["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let zero_budget = rows[0]["best_eve_info"].as_f64().unwrap();
    let unconstrained = rows[1]["best_eve_info"].as_f64().unwrap();
    assert!(zero_budget <= 1e-6);
    // The copy-attack restart alone puts a full bit on the open end.
    assert!(unconstrained >= 0.9);
}

#[test]
fn attack_search_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("search.json");
    let out = asqkd(&[
        "attack-search",
        "--epsilon",
        "1",
        "--restarts",
        "2",
        "--max-iters",
        "10",
        "--ancilla",
        "1",
        "--seed",
        "21",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = read_json(&path);
    assert_eq!(summary["command"], "attack-search");
    assert_eq!(summary["config"]["epsilon"], 1.0);
    assert_eq!(summary["config"]["ancilla_qubits"], 1);
    // The copy-attack restart is always found at ε = 1.
    assert!(summary["report"]["best_eve_info"].as_f64().unwrap() >= 0.9);
    let vector = summary["report"]["parameter_vector"].as_array().unwrap();
    assert_eq!(vector.len(), 2 * 64);
}

#[test]
fn attack_search_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path_a = dir.path().join("a.json");
    let path_b = dir.path().join("b.json");
    for path in [&path_a, &path_b] {
        let out = asqkd(&[
            "attack-search",
            "--epsilon",
            "0.2",
            "--restarts",
            "2",
            "--max-iters",
            "8",
            "--ancilla",
            "1",
            "--seed",
            "5",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(
        std::fs::read(&path_a).unwrap(),
        std::fs::read(&path_b).unwrap()
    );
}

#[test]
fn compare_prints_table_and_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("compare.json");
    let out = asqkd(&[
        "compare",
        "--n",
        "8",
        "--m",
        "8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Yu et al."));
    assert!(text.contains("1/6"));

    let summary = read_json(&path);
    let rows = summary["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["qubit_efficiency"], "1/10");
    assert_eq!(rows[0]["pre_shared_bits"], 48);
    assert_eq!(rows[1]["qubit_efficiency"], "1/9");
    assert_eq!(rows[1]["pre_shared_bits"], 32);
    assert_eq!(rows[2]["qubit_efficiency"], "1/6");
    assert_eq!(rows[2]["pre_shared_bits"], 24);
}

#[test]
fn compare_csv_cells() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("compare.csv");
    let out = asqkd(&[
        "compare",
        "--n",
        "1",
        "--m",
        "1",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].contains("1/10"));
    assert!(lines[2].contains("1/9"));
    assert!(lines[3].contains("1/6"));
}
