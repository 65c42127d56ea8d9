use std::fs;
use std::process::{Command, Output};

use relacheck::domain::{Outcome, Problem, RejectionPattern, TestSuite, EDGE, FUNCTIONAL};
use relacheck::harness::{build_suites, classify_against, Candidate};
use relacheck::report::VennReport;
use serde_json::Value;

const FIXTURE: &str = env!("CARGO_BIN_EXE_relacheck-fixture");

fn relacheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relacheck"))
        .args(args)
        .env_remove("RELACHECK_SEED")
        .output()
        .expect("relacheck runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(mode: &str) -> String {
    format!("{FIXTURE} {mode}")
}

#[test]
fn crashing_candidate_gets_error_verdicts() {
    let suites = build_suites(Problem::Toposort).unwrap();
    let candidate = Candidate::external(&fixture("crash")).unwrap();
    let pattern = classify_against(&candidate, Problem::Toposort, &suites).unwrap();
    assert!(!pattern.functional_accepted);
    assert!(pattern.rejected_by.contains(EDGE));
    assert!(pattern.verdicts[EDGE]
        .iter()
        .all(|v| v.outcome == Outcome::Error));
}

#[test]
fn hanging_candidate_times_out() {
    let suites: Vec<TestSuite> = build_suites(Problem::Sort)
        .unwrap()
        .into_iter()
        .filter(|s| s.name == EDGE)
        .collect();
    let candidate = Candidate::external(&fixture("hang"))
        .unwrap()
        .with_timeout(std::time::Duration::from_millis(100));
    let pattern = classify_against(&candidate, Problem::Sort, &suites).unwrap();
    assert_eq!(pattern.rejected_by.len(), 1);
    assert!(pattern.verdicts[EDGE]
        .iter()
        .all(|v| v.outcome == Outcome::Timeout));
}

#[test]
fn garbage_answers_are_errors() {
    let suites = build_suites(Problem::Match).unwrap();
    let candidate = Candidate::external(&fixture("garbage")).unwrap();
    let pattern = classify_against(&candidate, Problem::Match, &suites).unwrap();
    assert!(!pattern.functional_accepted);
    for verdicts in pattern.verdicts.values() {
        assert!(verdicts.iter().all(|v| v.outcome == Outcome::Error));
    }
}

#[test]
fn grade_external_candidate_from_cli() {
    let cmd = fixture("validator");
    let out = relacheck(&["grade", "--problem", "sort", "--candidate", &cmd]);
    let pattern: RejectionPattern = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!(pattern.functional_accepted);
    assert!(pattern.rejected_by.is_empty());
}

#[test]
fn launch_failure_exits_with_two() {
    let out = relacheck(&[
        "grade",
        "--problem",
        "sort",
        "--candidate",
        "/nonexistent/validator",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("failed to launch"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(
        relacheck(&["grade", "--problem", "sort"]).status.code(),
        Some(1)
    );
    assert_eq!(
        relacheck(&["gen", "--problem", "heap", "--size", "3"])
            .status
            .code(),
        Some(1)
    );
    let out = relacheck(&["grade", "--problem", "sort", "--mutant", "no-such-mutant"]);
    assert_eq!(out.status.code(), Some(1));
    let out = relacheck(&[
        "grade",
        "--problem",
        "sort",
        "--reference",
        "--suites",
        "BOGUS",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn grade_text_shows_attribution_and_table() {
    let out = relacheck(&[
        "grade",
        "--problem",
        "sort",
        "--all-mutants",
        "--format",
        "text",
    ]);
    let text = stdout(&out);
    assert!(text.contains("mutant:exact-reference-equality  {RELATIONAL}"));
    assert!(text.contains("NOT-FUNCTIONAL"));
    assert!(text.contains("universe: "));
}

#[test]
fn grade_subset_of_suites_still_runs_functional() {
    let out = relacheck(&[
        "grade",
        "--problem",
        "sort",
        "--mutant",
        "ignore-order",
        "--suites",
        "ENFORCE-ORDERED",
    ]);
    let pattern: RejectionPattern = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(pattern.verdicts.len(), 2);
    assert!(pattern.verdicts.contains_key(FUNCTIONAL));
    assert_eq!(
        pattern.rejected_by.iter().collect::<Vec<_>>(),
        ["ENFORCE-ORDERED"]
    );
}

#[test]
fn grade_then_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let patterns = dir.path().join("patterns.jsonl");
    let out = relacheck(&[
        "grade",
        "--problem",
        "toposort",
        "--all-mutants",
        "--out",
        patterns.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: VennReport = serde_json::from_str(&stdout(&relacheck(&[
        "report",
        "--patterns",
        patterns.to_str().unwrap(),
    ])))
    .unwrap();
    assert_eq!(
        report.universe,
        fs::read_to_string(&patterns).unwrap().lines().count()
    );
    assert_eq!(
        report.regions.values().sum::<usize>() + report.not_functional,
        report.universe
    );
}

#[test]
fn suites_are_exported_as_json_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out = relacheck(&[
        "suites",
        "--problem",
        "match",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for suite in build_suites(Problem::Match).unwrap() {
        let text = fs::read_to_string(dir.path().join(format!("{}.json", suite.name))).unwrap();
        let back: TestSuite = serde_json::from_str(&text).unwrap();
        assert_eq!(back, suite);
    }
}

#[test]
fn enumerate_prints_every_valid_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fan.json");
    fs::write(
        &path,
        r#"{"vertices":["a","b","c"],"edges":[["a","b"],["a","c"]]}"#,
    )
    .unwrap();
    let text = stdout(&relacheck(&[
        "enumerate",
        "--problem",
        "toposort",
        "--instance",
        path.to_str().unwrap(),
    ]));
    assert_eq!(text, "[\"a\",\"b\",\"c\"]\n[\"a\",\"c\",\"b\"]\n");

    fs::write(
        &path,
        r#"{"vertices":["a","b"],"edges":[["a","b"],["b","a"]]}"#,
    )
    .unwrap();
    let out = relacheck(&[
        "enumerate",
        "--problem",
        "toposort",
        "--instance",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cycle"));

    fs::write(
        &path,
        r#"{"lst":[{"name":"A","age":1},{"name":"B","age":1}],"srt":[]}"#,
    )
    .unwrap();
    let text = stdout(&relacheck(&[
        "enumerate",
        "--problem",
        "sort",
        "--instance",
        path.to_str().unwrap(),
    ]));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn gen_emits_parseable_inputs() {
    let sort: Value = serde_json::from_str(&stdout(&relacheck(&[
        "gen",
        "--problem",
        "sort",
        "--size",
        "4",
    ])))
    .unwrap();
    assert_eq!(sort.as_array().unwrap().len(), 4);
    let prefs: Value = serde_json::from_str(&stdout(&relacheck(&[
        "gen",
        "--problem",
        "match",
        "--size",
        "3",
    ])))
    .unwrap();
    assert_eq!(prefs["candidate_prefs"].as_array().unwrap().len(), 3);
    let dag: Value = serde_json::from_str(&stdout(&relacheck(&[
        "gen",
        "--problem",
        "toposort",
        "--size",
        "5",
        "--edge-prob",
        "1",
    ])))
    .unwrap();
    assert_eq!(dag["edges"].as_array().unwrap().len(), 10);
    let bad = relacheck(&[
        "gen",
        "--problem",
        "toposort",
        "--size",
        "3",
        "--edge-prob",
        "1.5",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

fn check(problem: &str, mode: &str) -> Value {
    let out = relacheck(&[
        "check",
        "--problem",
        problem,
        "--impl",
        &fixture(mode),
        "--sizes",
        "0,1,4",
        "--trials",
        "3",
    ]);
    serde_json::from_str(&stdout(&out)).unwrap()
}

#[test]
fn check_accepts_reference_solvers() {
    for problem in ["sort", "match", "toposort"] {
        let report = check(problem, "solver");
        assert_eq!(report["passed"], true, "{problem}: {report}");
    }
}

#[test]
fn check_rejects_identity_sort() {
    let report = check("sort", "identity");
    assert_eq!(report["passed"], false);
    let failing: Vec<&Value> = report["trials"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t["passed"] == false)
        .collect();
    assert!(!failing.is_empty());
    assert!(failing[0]["diagnostic"]
        .as_str()
        .unwrap()
        .contains("ORDERED"));
}

#[test]
fn check_flags_duplicated_vertices() {
    let report = check("toposort", "duplicate");
    assert_eq!(report["passed"], false);
    let diagnostics: Vec<&str> = report["trials"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|t| t["diagnostic"].as_str())
        .collect();
    assert!(
        diagnostics.iter().any(|d| d.contains("NO-DUPS")),
        "{diagnostics:?}"
    );
}

#[test]
fn check_text_format_ends_with_overall() {
    let out = relacheck(&[
        "check",
        "--problem",
        "sort",
        "--impl",
        &fixture("solver"),
        "--sizes",
        "2",
        "--trials",
        "1",
        "--format",
        "text",
    ]);
    assert!(stdout(&out).ends_with("overall: pass\n"));
}
