use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ldgm_sm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldgm-sm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn max_weight(out: &str) -> usize {
    out.lines()
        .find_map(|l| l.strip_prefix("max measured weight "))
        .and_then(|r| r.split_whitespace().next()?.parse().ok())
        .expect("max weight line")
}

fn listed_weights(out: &str) -> Vec<usize> {
    out.lines()
        .filter_map(|l| l.trim().strip_prefix("weight "))
        .map(|r| r.split(':').next().unwrap().trim().parse().unwrap())
        .collect()
}

#[test]
fn verify_builtin_fixtures_pass() {
    let o = ldgm_sm(&["verify", "--builtin"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.contains("[60, 24, 7]") && l.ends_with("PASS")).count(), 6, "{out}");
}

#[test]
fn verify_fixture_directory_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let h6 = ldgm_sm::peg::BUILTIN_FIXTURES.iter().find(|(n, _)| *n == "h6x15").unwrap().1;
    let path = dir.path().join("h6x15.txt");
    fs::write(&path, h6).unwrap();
    let o = ldgm_sm(&["verify", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("h6x15: [60, 24, 7]"));
    let o = ldgm_sm(&["verify", "--fixtures", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
}

#[test]
fn duplicate_shift_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "N=4\nx^2+x^2; 1\n").unwrap();
    let o = ldgm_sm(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error"), "{}", stderr(&o));
}

#[test]
fn wrong_declared_parameters_fail() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    let text = ldgm_sm::peg::BUILTIN_FIXTURES[0].1.replace("expect=60,24,7", "expect=60,24,8");
    fs::write(&path, text).unwrap();
    let o = ldgm_sm(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).trim_end().ends_with("FAIL"));
}

#[test]
fn verify_repetition() {
    let o = ldgm_sm(&["verify", "--repetition", "24,5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("[120, 24, 5]"));
}

#[test]
fn encode_fixture_confines_weights() {
    let dir = tempfile::tempdir().unwrap();
    let o = ldgm_sm(&["encode", "--code", "rsc:5", "--sm", "builtin:h2x5_2", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(max_weight(&out) <= 12);
    assert!(listed_weights(&out).iter().any(|&w| w < 12));
    let audit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("measured_set.json")).unwrap()).unwrap();
    assert_eq!(audit.as_array().unwrap().len(), 60);
}

#[test]
fn encode_identity_keeps_generator_weight() {
    let o = ldgm_sm(&["encode", "--code", "rsc:5", "--sm", "identity"]);
    assert!(o.status.success());
    assert_eq!(max_weight(&stdout(&o)), 4);
}

#[test]
fn encode_rejects_row_mismatch() {
    let o = ldgm_sm(&["encode", "--code", "rsc:3", "--sm", "builtin:h6x15"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn construct_two_by_five() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = ldgm_sm(&["construct", "--nc", "2", "--nv", "5", "--ds", "3", "--lift", "12", "--seed", "0", "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["protograph.txt", "lift.txt", "generator.txt", "report.json"] {
        assert!(Path::new(out).join(f).exists(), "{f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["n"], 60);
    assert_eq!(report["k"], 24);
    assert!(report["distance"].as_u64().unwrap() <= 7);
    assert_eq!(report["d_max_bound"], 7);
    let lift = fs::read_to_string(dir.path().join("lift.txt")).unwrap();
    let reparsed = ldgm_sm::peg::parse_poly_matrix(&lift).unwrap();
    assert_eq!(reparsed.expand().to_text(), fs::read_to_string(dir.path().join("generator.txt")).unwrap());
}

#[test]
fn construct_trivial_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = ldgm_sm(&["construct", "--nc", "1", "--nv", "1", "--ds", "1", "--lift", "1", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("[1, 1, 1]"));
}

#[test]
fn construct_rejects_bad_degree_length() {
    let o = ldgm_sm(&["construct", "--nc", "2", "--nv", "5", "--ds", "3,3", "--lift", "12"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "simulate", "--seed", "7", "--grid", "0.05:0.1:2", "--trials", "100", "--exhaustive-cap", "1000", "--model",
        "meas", "--out", out,
    ];
    let o = ldgm_sm(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let results = fs::read_to_string(dir.path().join("results_meas.csv")).unwrap();
    let mut lines = results.lines();
    assert_eq!(
        lines.next().unwrap(),
        "code_id,model,p_m,p_q,pr_logical,ci_low,ci_high,truncation_tail"
    );
    assert_eq!(lines.count(), 7 * 2);
    let strata = fs::read_to_string(dir.path().join("strata_meas.csv")).unwrap();
    assert!(strata.starts_with("code_id,w_q,w_m,trials,failures,p_l,exact_flag"));
    assert!(dir.path().join("manifest.json").exists());

    let again = tempfile::tempdir().unwrap();
    let mut args2 = args;
    args2[12] = again.path().to_str().unwrap();
    assert!(ldgm_sm(&args2).status.success());
    assert_eq!(results, fs::read_to_string(again.path().join("results_meas.csv")).unwrap());
}

#[test]
fn simulate_rejects_empty_grid_and_missing_seed() {
    let o = ldgm_sm(&["simulate", "--seed", "1", "--grid", "0.01:0.1:0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ldgm_sm(&["simulate", "--grid", "0.01:0.1:3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"));
}
