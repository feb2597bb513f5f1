use std::process::{Command, Output};

fn rigcap(args: &[&str]) -> Output {
    rigcap_env(args, None)
}

fn rigcap_env(args: &[&str], budget: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rigcap"));
    cmd.args(args).env_remove("RIGCAP_STEP_BUDGET");
    if let Some(b) = budget {
        cmd.env("RIGCAP_STEP_BUDGET", b);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn spectrum_eval_grid_rows() {
    let out = rigcap(&["spectrum", "eval", "--bandwidth", "4", "--terms", "8", "--enum", "recursive:evens", "--grid", "6"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "f,N_lo,N_hi,M,tail_bound");
    assert_eq!(lines.len(), 66);
    assert_eq!(lines[33], "2,0,0,8,0");
}

#[test]
fn exported_grid_feeds_waterfill_with_a_domain_error_at_the_center() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    let out = rigcap(&["spectrum", "export-grid", "--terms", "8", "--grid", "4", "--out", grid.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    // the exported ranges carry no log integrals, so the zero-noise center band
    // cannot be bounded once it receives water
    let out = rigcap(&["capacity", "waterfill", "--power", "1", "--noise-csv", grid.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("zero noise"), "{}", stderr(&out));
}

#[test]
fn insufficient_enumeration_exits_3_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("never.csv");
    let out = rigcap_env(
        &["spectrum", "eval", "--terms", "1000000000", "--enum", "recursive:evens", "--out", path.to_str().unwrap()],
        Some("5000"),
    );
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("RIGCAP_STEP_BUDGET"));
    assert!(!path.exists());
}

#[test]
fn budget_controls_halting_discovery() {
    let small = rigcap_env(&["capacity", "constructed", "--f1", "1", "--terms", "30"], Some("200"));
    assert_eq!(code(&small), 3, "{}", stderr(&small));
    let bad = rigcap_env(&["enum", "run"], Some("lots"));
    assert_eq!(code(&bad), 2);
}

#[test]
fn configuration_errors_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let p = path.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["capacity", "constructed", "--f1", "0.1", "--out", p],
        vec!["capacity", "constructed", "--f1", "3", "--out", p],
        vec!["capacity", "constructed", "--f1", "1", "--n0", "1", "--bandwidth", "2", "--out", p],
        vec!["capacity", "constructed", "--f1", "1", "--enum", "recursive:fibs", "--out", p],
        vec!["capacity", "constructed", "--f1", "1", "--enum", "table:/nonexistent.json", "--out", p],
        vec!["capacity", "constructed", "--f1", "1", "--precision-bits", "8", "--out", p],
        vec!["capacity", "constructed", "--f1", "1", "--format", "csv", "--out", p],
        vec!["capacity", "waterfill", "--power", "-1", "--out", p],
        vec!["spectrum", "eval", "--grid", "0", "--out", p],
        vec!["spectrum", "eval", "--terms", "0", "--out", p],
        vec!["demo", "stall", "--enum", "recursive:odds", "--expect-stall", "--out", p],
        vec!["demo", "stall", "--min-terms", "40", "--terms", "8", "--out", p],
        vec!["enum", "run", "--threads", "0", "--out", p],
    ];
    for args in cases {
        let out = rigcap(&args);
        assert_eq!(code(&out), 2, "`{}`: {}", args.join(" "), stderr(&out));
        assert!(!path.exists(), "`{}` left an artifact", args.join(" "));
    }
}

#[test]
fn nondyadic_input_suggests_the_nearest_dyadic() {
    let out = rigcap(&["capacity", "constructed", "--f1", "0.3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("nearest dyadic"), "{}", stderr(&out));
}

#[test]
fn high_power_below_threshold_names_the_gap() {
    let out = rigcap(&["capacity", "highpower", "--power", "10", "--terms", "12", "--enum", "recursive:evens"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("gap"), "{}", stderr(&out));
}

#[test]
fn constructed_on_halting_backend_misses_small_requests() {
    let out = rigcap(&["capacity", "constructed", "--f1", "1", "--terms", "20", "--request-width", "0.0001220703125"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["met_request"], false);
    let recursive =
        rigcap(&["capacity", "constructed", "--f1", "1", "--terms", "20", "--enum", "recursive:evens", "--request-width", "0.0001220703125"]);
    let v: serde_json::Value = serde_json::from_slice(&recursive.stdout).unwrap();
    assert_eq!(v["met_request"], true);
}

#[test]
fn zero_power_waterfill() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("g.csv");
    std::fs::write(&grid, "f_center,delta_f,N_lo,N_hi\n0.25,0.5,1,1\n0.75,0.5,2,2\n").unwrap();
    let out = rigcap(&["capacity", "waterfill", "--power", "0", "--noise-csv", grid.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["capacity"]["lo"], "0");
    assert_eq!(v["capacity"]["hi"], "0");
}

#[test]
fn stall_summary_and_recursive_flag() {
    let out = rigcap(&["demo", "stall", "--terms", "12"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("stalled true"));
    let out = rigcap(&["demo", "stall", "--terms", "12", "--enum", "recursive:squares"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("stalled false"));
}

#[test]
fn enum_run_lists_golden_prefix() {
    let out = rigcap_env(&["enum", "run"], Some("50000"));
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let golden: serde_json::Value =
        serde_json::from_str(include_str!("../../core/tests/golden/halting_b50000.json")).unwrap();
    assert_eq!(v["elements"], golden["elements"]);
    assert_eq!(v["steps_used"], golden["budget"]);
    assert_eq!(v["excluded_mass"], "0.03125");
}
