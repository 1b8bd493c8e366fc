use std::path::Path;
use std::process::{Command, Output};

fn screenlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_screenlab")).args(args).output().unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn header_matches_golden_file() {
    let golden = read(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/header.csv"));
    assert_eq!(format!("{}\n", screenlab::output::CSV_HEADER), golden);
    let out = screenlab(&["run", "--runs", "5"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with(&golden));
}

#[test]
fn single_point_run_writes_header_and_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("o.csv");
    let out = screenlab(&[
        "run",
        "--n",
        "120",
        "--k",
        "6",
        "--q",
        "0.5",
        "--problem",
        "good",
        "--screener",
        "algo",
        "--psi",
        "0.4",
        "--runs",
        "1000",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&path);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("run,none,NA,120,6,0.500000,0.400000,NA,"));
    assert!(lines[1].ends_with(",7"));
}

#[test]
fn threads_never_change_output() {
    let args = ["run", "--runs", "300", "--screener", "human", "--fatigue", "eps2", "--sweep", "psi=0.3,0.5"];
    let one = screenlab(&[&args[..], &["--threads", "1"]].concat());
    let many = screenlab(&[&args[..], &["--threads", "3"]].concat());
    let auto = screenlab(&args);
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(one.stdout, auto.stdout);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"id": "file", "n": 40, "k": 4, "runs": 20, "sweep": "q=0,0.5"}"#).unwrap();
    let out = screenlab(&["run", "--config", cfg.to_str().unwrap(), "--k", "5"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert!(row.starts_with("file,q,"));
        assert!(row.contains(",40,5,"));
    }
}

#[test]
fn validate_prints_normalized_config_that_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        screenlab(&["validate", "--iso", "correlated", "--rho", "-0.5", "--fatigue", "eps1", "--screener", "human"]);
    assert!(out.status.success());
    let cfg = dir.path().join("norm.json");
    std::fs::write(&cfg, &out.stdout).unwrap();
    let again = screenlab(&["validate", "--config", cfg.to_str().unwrap()]);
    assert!(again.status.success());
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 3, "k": 9}"#).unwrap();
    assert_eq!(screenlab(&["validate", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(screenlab(&["validate", "--config", "/nonexistent/x.json"]).status.code(), Some(1));
    assert_eq!(screenlab(&["run", "--rho", "-0.5"]).status.code(), Some(1));
    assert_eq!(screenlab(&["run", "--bogus"]).status.code(), Some(1));
    let unwritable = dir.path().join("missing/dir/o.csv");
    let out = screenlab(&["run", "--runs", "2", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn psi_under_best_k_warns_but_runs() {
    let out = screenlab(&["run", "--problem", "best", "--psi", "0.7", "--runs", "10"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn suite_rows_match_grids() {
    let dir = tempfile::tempdir().unwrap();
    let out = screenlab(&["suite", "--out", dir.path().to_str().unwrap(), "--runs", "10", "--only", "fig3-q,fig1-nk"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for fig in screenlab::figure_suite().into_iter().filter(|f| f.name == "fig3-q" || f.name == "fig1-nk") {
        let expected: usize = fig.series.iter().map(|s| s.sweep.as_ref().map_or(1, |w| w.values.len())).sum();
        let csv = read(&dir.path().join(format!("{}.csv", fig.name)));
        assert_eq!(csv.lines().count(), expected + 1, "{}", fig.name);
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}
