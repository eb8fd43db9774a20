use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use remr_core::analysis::ReliabilityReport;

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn golden() -> PathBuf {
    repo("scenarios/remr-paper.scenario")
}

fn remr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_remr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const SINGLE_PLAN: &str = r#"{
  "branches": [{"id": "l1", "lead_time": 1, "bandwidth": {"1": 0.3, "2": 0.7}}],
  "nodes": [
    {"id": "dev", "kind": "compute", "ratio": 1.0, "resource": {"1": 0.4, "2": 0.6}},
    {"id": "cloud", "kind": "sink"}
  ],
  "plans": [{"name": "only", "path": ["dev", "l1", "cloud"]}],
  "defaults": {"input_size": 2, "deadline": 3}
}
"#;

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn evaluate_prints_plans_and_global() {
    let out = remr(&["evaluate", "--scenario", golden().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("C = 15, T = 25"));
    assert!(text.contains("global reliability: 0.59532"), "{text}");
    assert!(stderr(&out).is_empty());
}

#[test]
fn missing_scenario_exits_2() {
    let out = remr(&["evaluate", "--scenario", "/nonexistent/x.scenario"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot read scenario"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn guard_exceeded_exits_3() {
    let out = remr(&[
        "evaluate",
        "--scenario",
        golden().to_str().unwrap(),
        "--guard",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("guard"));
}

#[test]
fn single_plan_global_equals_plan() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "one.scenario", SINGLE_PLAN);
    let out = remr(&[
        "evaluate",
        "--scenario",
        path.to_str().unwrap(),
        "--format",
        "structured",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: ReliabilityReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.per_plan.len(), 1);
    assert_eq!(report.global, report.per_plan[0].reliability);
    // 1 + ceil(2/x) + 2/y <= 3 needs x = 2 and y = 2
    assert!((report.global - 0.42).abs() < 1e-12);
}

#[test]
fn structured_report_round_trips() {
    let out = remr(&[
        "evaluate",
        "--scenario",
        golden().to_str().unwrap(),
        "--format",
        "structured",
        "--cross-check",
        "--trials",
        "20000",
    ]);
    assert!(out.status.success());
    let report: ReliabilityReport = serde_json::from_slice(&out.stdout).unwrap();
    let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(again, stdout(&out));
    let cc = report.diagnostics.unwrap();
    assert!(cc.per_plan.iter().all(|d| d.exact_delta.abs() < 1e-9));
}

#[test]
fn single_cell_sweep_equals_evaluate() {
    let g = golden();
    let g = g.to_str().unwrap();
    let sweep = remr(&[
        "sweep",
        "--scenario",
        g,
        "--sweep-c",
        "14",
        "--sweep-t",
        "22",
        "--format",
        "csv",
    ]);
    assert!(sweep.status.success(), "{}", stderr(&sweep));
    let text = stdout(&sweep);
    let cell = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .to_owned();
    let eval = remr(&[
        "evaluate",
        "--scenario",
        g,
        "--input-size",
        "14",
        "--deadline",
        "22",
        "--format",
        "csv",
    ]);
    let global = stdout(&eval)
        .lines()
        .find(|l| l.starts_with("global,"))
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .to_owned();
    assert_eq!(cell, global);
}

#[test]
fn sweep_grid_has_deadline_rows() {
    let out = remr(&[
        "sweep",
        "--scenario",
        golden().to_str().unwrap(),
        "--sweep-c",
        "16,14,15",
        "--sweep-t",
        "25,20",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let lines: Vec<_> = stdout(&out).lines().map(str::to_owned).collect();
    assert_eq!(lines[0], "T,C=14,C=15,C=16");
    assert!(lines[1].starts_with("20,"));
    assert!(lines[2].starts_with("25,"));
    assert_eq!(lines.len(), 3);
}

#[test]
fn simulate_single_trial() {
    let out = remr(&[
        "simulate",
        "--scenario",
        golden().to_str().unwrap(),
        "--trials",
        "1",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let global = text.lines().find(|l| l.starts_with("global,")).unwrap();
    let est = global.split(',').nth(1).unwrap();
    assert!(est == "0.00000" || est == "1.00000", "{global}");
}

#[test]
fn simulate_cross_check_reports_delta() {
    let out = remr(&[
        "simulate",
        "--scenario",
        golden().to_str().unwrap(),
        "--trials",
        "100000",
        "--cross-check",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("analytic: 0.59532"), "{text}");
    assert!(text.contains("within interval"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let g = golden();
    let g = g.to_str().unwrap();
    for args in [
        vec![
            "evaluate",
            "--scenario",
            g,
            "--cross-check",
            "--trials",
            "50000",
        ],
        vec![
            "simulate",
            "--scenario",
            g,
            "--trials",
            "50000",
            "--seed",
            "99",
        ],
    ] {
        let a = remr(&args);
        let b = remr(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn check_summarizes_golden_file() {
    let out = remr(&["check", "--scenario", golden().to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.starts_with("3 plans, 10 branches, 8 nodes\n"),
        "{text}"
    );
    assert!(stderr(&out).is_empty());
}

#[test]
fn check_warns_about_unreachable_deadline() {
    let out = remr(&[
        "check",
        "--scenario",
        golden().to_str().unwrap(),
        "--deadline",
        "20",
    ]);
    assert!(out.status.success());
    let err = stderr(&out);
    assert!(err.contains("warning: plan `a`"), "{err}");
    assert!(err.contains("warning: plan `b`"));
    assert!(!err.contains("plan `c`"));
}

#[test]
fn check_names_dangling_reference() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        &dir,
        "bad.scenario",
        &SINGLE_PLAN.replace(r#"["dev", "l1", "cloud"]"#, r#"["dev", "l9", "cloud"]"#),
    );
    let out = remr(&["check", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("l9"), "{}", stderr(&out));
}

#[test]
fn ingest_single_machine_fragment() {
    let dir = tempfile::tempdir().unwrap();
    let trace = write(
        &dir,
        "trace.csv",
        "timestamp,machine_id,cpu_usage\n0,m,0.0\n1,m,0.5\n2,m,0.5\n3,m,1.0\n",
    );
    let out = remr(&[
        "ingest",
        "--trace",
        trace.to_str().unwrap(),
        "--machine",
        "m",
        "--levels",
        "2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let pmf: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(pmf, serde_json::json!({"0": 0.25, "1": 0.5, "2": 0.25}));
}

#[test]
fn ingest_splices_into_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let trace = write(
        &dir,
        "trace.csv",
        "timestamp,machine_id,cpu_usage\n0,m,0.5\n1,m,0.5\n",
    );
    let scenario = write(&dir, "one.scenario", SINGLE_PLAN);
    let out_path = dir.path().join("spliced.scenario");
    let out = remr(&[
        "ingest",
        "--trace",
        trace.to_str().unwrap(),
        "--splice",
        scenario.to_str().unwrap(),
        "--assign",
        "m=dev",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let spliced = remr_core::parse_scenario(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let dev = spliced.node("dev").unwrap().compute().unwrap();
    assert_eq!(dev.resource, remr_core::Pmf::degenerate(3));
}

#[test]
fn ingest_rejects_unknown_node() {
    let dir = tempfile::tempdir().unwrap();
    let trace = write(
        &dir,
        "trace.csv",
        "timestamp,machine_id,cpu_usage\n0,m,0.5\n",
    );
    let scenario = write(&dir, "one.scenario", SINGLE_PLAN);
    let out = remr(&[
        "ingest",
        "--trace",
        trace.to_str().unwrap(),
        "--splice",
        scenario.to_str().unwrap(),
        "--assign",
        "m=nowhere",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("nowhere"));
}
