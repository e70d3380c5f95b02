use std::process::{Command, Output};

fn qarm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qarm"))
        .args(args)
        .env_remove("QARM_QUBIT_CAP")
        .env_remove("QARM_DATA_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classical_toy_json() {
    let o = qarm(&["mine-classical", "--synthetic", "toy", "--min-supp", "1/2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    let stats = &v["methods"][0]["stats"];
    assert_eq!(stats[0]["m_candidates"], 3);
    assert_eq!(stats[0]["m_frequent"], 2);
    assert_eq!(stats[1]["m_frequent"], 1);
    assert_eq!(v["methods"][0]["counters"]["classical_row_scans"], 3 * 4 + 2 * 4);
}

#[test]
fn quantum_toy_agrees_with_classical() {
    let q = qarm(&["mine-quantum", "--synthetic", "toy", "-t", "8", "--min-supp", "0.5", "--format", "csv"]);
    let c = qarm(&["mine-classical", "--synthetic", "toy", "--min-supp", "0.5", "--format", "csv"]);
    assert!(q.status.success() && c.status.success());
    assert_eq!(stdout(&q).replace("quantum", "classical"), stdout(&c));
}

#[test]
fn same_seed_same_bytes() {
    let args = ["compare", "--synthetic", "random:10:4:0.6", "--seed", "3", "-t", "16", "--min-supp", "40%", "--epsilon", "0.1"];
    let a = qarm(&args);
    let b = qarm(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn qubit_cap_refusal_exits_nonzero() {
    let o = qarm(&["mine-quantum", "--synthetic", "random:1048576:2:0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("refusing"));
    let o = Command::new(env!("CARGO_BIN_EXE_qarm"))
        .args(["mine-quantum", "--synthetic", "toy", "-t", "8"])
        .env("QARM_QUBIT_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qarm(&["mine-classical"]).status.code(), Some(2));
    assert_eq!(qarm(&["mine-classical", "--synthetic", "toy", "--min-supp", "2"]).status.code(), Some(2));
    assert_eq!(qarm(&["mine-quantum", "--synthetic", "toy", "-t", "10"]).status.code(), Some(2));
    assert_eq!(qarm(&["mine-classical", "--input", "/nonexistent/db.dat"]).status.code(), Some(2));
    assert_eq!(qarm(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn appendix_skips_missing_and_fails_on_mismatch() {
    let o = qarm(&["reproduce-appendix", "--data-dir", "/nonexistent", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("SKIPPED"));

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("retail.dat"), "1 2\n2 3\n").unwrap();
    let o = qarm(&["reproduce-appendix", "--data-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let statuses: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["status"].as_str().unwrap()).collect();
    assert!(statuses.contains(&"fail"));
    assert!(statuses.contains(&"skipped"));
}

#[test]
fn output_file_and_datasets_helper() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = qarm(&["mine-sampling", "--synthetic", "toy", "--epsilon", "0.05", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["methods"][0]["samples_per_support"], 400);
    let o = qarm(&["datasets"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("kosarak.dat"));
}
