use std::path::Path;
use std::process::{Command, Output};

fn hallcanon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hallcanon")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn oracle_hall_number() {
    let o = hallcanon(&["oracle", "hall", "--q", "2", "--C", "O+O", "--B", "O(-1)", "--A", "O(1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "6");
}

#[test]
fn oracle_aut_of_trivial_rank_two_bundle() {
    let o = hallcanon(&["oracle", "aut", "--q", "2", "--sheaf", "O+O"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "6");
}

#[test]
fn oracle_hall_rejects_mismatched_classes() {
    let o = hallcanon(&["oracle", "hall", "--q", "2", "--C", "O+O", "--B", "O(-1)", "--A", "O(2)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_json_record() {
    let o = hallcanon(&["oracle", "aut", "--q", "3", "--sheaf", "O(1)", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["aut"], "2");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hallcanon(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(hallcanon(&["canon", "--window", "0"]).status.code(), Some(2));
    assert_eq!(hallcanon(&["canon", "--class", "x", "--window", "0"]).status.code(), Some(2));
    assert_eq!(hallcanon(&["canon", "--class", "3,0", "--window", "0"]).status.code(), Some(2));
    assert_eq!(hallcanon(&["oracle", "aut", "--q", "6", "--sheaf", "O"]).status.code(), Some(2));
    assert_eq!(hallcanon(&["canon", "--class", "1,0", "--window", "0", "--budget", "0"]).status.code(), Some(2));
}

#[test]
fn canon_writes_schur_elements() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.json");
    let o = hallcanon(&["canon", "--class", "0,3", "--window", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let idx: Vec<&str> = v["basis"].as_array().unwrap().iter().map(|b| b["index"].as_str().unwrap()).collect();
    assert_eq!(idx, ["s[111]", "s[21]", "s[3]"]);
}

#[test]
fn canon_rank_one_closed_form_as_csv() {
    let o = hallcanon(&["canon", "--class", "1,0", "--window", "-2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for row in ["E[0],E[0],1", "E[0],E[-1] s[1],v", "E[0],E[-2] s[2],v^2"] {
        assert!(text.lines().any(|l| l == row), "missing {row} in\n{text}");
    }
}

#[test]
fn canon_empty_window() {
    let o = hallcanon(&["canon", "--class", "1,0", "--window", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "index,monomial,coefficient");
}

#[test]
fn canon_budget_exhaustion_exits_three() {
    let o = hallcanon(&["canon", "--class", "2,0", "--window", "-4", "--budget", "5"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn canon_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = hallcanon(&["canon", "--class", "2,1", "--window", "-1", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    std::fs::write(&cfg, r#"{"class": "0,2", "window": 0, "format": "csv"}"#).unwrap();
    let o = hallcanon(&["canon", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("index,monomial,coefficient"));
    std::fs::write(&cfg, r#"{"unknown": 1}"#).unwrap();
    assert_eq!(hallcanon(&["canon", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_refuses_without_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let o = hallcanon(&["verify", "relations", "--golden", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("calibrate"));
}

#[test]
fn verify_coproduct_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = hallcanon(&["verify", "coproduct", "--q", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["checks"][0]["pass"], true);
}

#[test]
fn verify_relations_at_q9() {
    let o = hallcanon(&["verify", "relations", "--q", "9", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("oracle relations q=9,true,true"));
}

#[test]
fn verify_appendix_reports_failure_with_counterexample() {
    let o = hallcanon(&["verify", "appendix", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["pass"] == false && !c["detail"].as_str().unwrap().is_empty()));
}

#[test]
fn verify_principal_exits_zero_on_report() {
    let o = hallcanon(&["verify", "principal", "--window", "-3", "--min-degree", "-2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!v["rows"].as_array().unwrap().is_empty());
}

#[test]
fn calibrate_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = hallcanon(&["calibrate", "--golden", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("golden/v1");
    for f in ["calibration.json", "cyclic_calibration.json"] {
        assert_eq!(std::fs::read_to_string(dir.path().join(f)).unwrap(), std::fs::read_to_string(golden.join(f)).unwrap(), "{f}");
    }
}
