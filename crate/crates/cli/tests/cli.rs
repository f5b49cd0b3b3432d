use std::process::{Command, Output};

use serde_json::Value;

fn qlens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlens"))
        .args(args)
        .env_remove("QLENS_CONFIG")
        .env_remove("QLENS_BUDGET")
        .env_remove("QLENS_EXTENDED_BUDGET")
        .env_remove("QLENS_WORKERS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn decide_uses_theorems() {
    let v = json(&qlens(&["decide", "5", "1", "3", "--", "2", "3"]));
    assert_eq!(v["theorem"], "d3");
    assert_eq!(v["equivalent"], true);
    let v = json(&qlens(&["decide", "8", "1", "5", "--", "1", "3"]));
    assert_eq!(v["equivalent"], false);
    let v = json(&qlens(&["decide", "5", "1", "1", "2", "--", "1", "2", "2"]));
    assert_eq!((v["theorem"].as_str(), v["equivalent"].as_bool()), (Some("d5-prime"), Some(false)));
    let v = json(&qlens(&["decide", "5", "1", "2", "3", "1", "--", "1", "3", "2", "1"]));
    assert_eq!(v["report"]["cond_vii"], true);
    assert_eq!(v["report"]["cond_vi"], false);
}

#[test]
fn precondition_errors_exit_2() {
    let out = qlens(&["decide", "6", "1", "2", "--", "1", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qlens(&["pattern", "7", "1", "2", "3", "4", "--", "1", "2", "3", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invariants_with_each_counter() {
    let a = json(&qlens(&["invariants", "5", "1", "3", "--counter", "enumerate"]));
    let b = json(&qlens(&["invariants", "5", "1", "3"]));
    assert_eq!(a["wbar"], b["wbar"]);
    assert_eq!(a["gcd_chain"], serde_json::json!([1]));
}

#[test]
fn solve_h_modes() {
    let v = json(&qlens(&["solve-h", "5", "1", "2", "3", "4", "--", "1", "2", "4", "3"]));
    assert_eq!(v["status"], "found");
    let v = json(&qlens(&[
        "solve-h", "--extended", "--budget", "10", "5", "1", "3", "4", "1", "2", "3", "--", "1", "4", "3", "1", "2", "4",
    ]));
    assert_eq!(v["result"]["status"], "found");
}

#[test]
fn pattern_of_walkthrough_pair() {
    let v = json(&qlens(&["pattern", "5", "1", "4", "2", "3", "4", "1", "3", "--", "1", "4", "3", "2", "4", "1", "2"]));
    assert_eq!(v["pattern"], "0101");
}

#[test]
fn export_dot_graphs() {
    for kind in ["skew", "f", "hasse"] {
        let out = qlens(&["export-dot", "5", "1", "3", "--graph", kind]);
        assert!(out.status.success());
        assert!(String::from_utf8(out.stdout).unwrap().starts_with("digraph "));
    }
}

#[test]
fn search_writes_stable_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str, tag: &str| {
        let jsonl = dir.path().join(format!("{tag}.jsonl"));
        let csv = dir.path().join(format!("{tag}.csv"));
        let out = qlens(&[
            "search", "5", "3", "--workers", workers, "--jsonl", jsonl.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        (std::fs::read_to_string(jsonl).unwrap(), std::fs::read_to_string(csv).unwrap())
    };
    let (j1, c1) = run("1", "one");
    let (j4, c4) = run("4", "four");
    assert_eq!((&j1, &c1), (&j4, &c4));
    assert_eq!(j1.lines().count() + 1, c1.lines().count());
    let first: Value = serde_json::from_str(j1.lines().next().unwrap()).unwrap();
    assert!(first["pair"].is_array());
}

#[test]
fn budget_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("qlens.conf");
    std::fs::write(&cfg, "# defaults\nbudget = 5\nworkers=2\n").unwrap();
    let marker = |out: Output| -> Value {
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        serde_json::from_str(text.lines().last().unwrap()).unwrap()
    };
    let base = ["search", "5", "3", "--conditions", "vi", "--config", cfg.to_str().unwrap()];
    assert_eq!(marker(qlens(&base))["pairs_examined"], 5);

    let with_env = Command::new(env!("CARGO_BIN_EXE_qlens")).args(base).env("QLENS_BUDGET", "7").output().unwrap();
    assert_eq!(marker(with_env)["pairs_examined"], 7);

    let with_flag = Command::new(env!("CARGO_BIN_EXE_qlens"))
        .args(base)
        .args(["--budget", "9"])
        .env("QLENS_BUDGET", "7")
        .output()
        .unwrap();
    assert_eq!(marker(with_flag)["pairs_examined"], 9);
}

#[test]
fn bad_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "budget\n").unwrap();
    let out = qlens(&["search", "5", "2", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected key=value"));
}
