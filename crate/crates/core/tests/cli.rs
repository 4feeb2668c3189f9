use std::fs;
use std::process::{Command, Output};

fn cellswitch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellswitch"))
        .args(args)
        .output()
        .expect("spawn cellswitch")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn sweep_to_stdout_has_header_and_rows() {
    let o = cellswitch(&[
        "sweep",
        "--users-list",
        "30",
        "--bel-list",
        "0,10",
        "--gamma",
        "3",
        "--snapshots",
        "1",
        "--formulation",
        "efm",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), cellswitch::harness::SWEEP_HEADER);
    assert_eq!(lines.count(), 2 * 4);
}

#[test]
fn repeated_weights_expand_wsm_rows() {
    let o = cellswitch(&[
        "sweep",
        "--users-list",
        "20",
        "--bel-list",
        "5",
        "--gamma",
        "3",
        "--snapshots",
        "1",
        "--formulation",
        "wsm",
        "--weights",
        "1,1,1",
        "--weights",
        "1,0.1,0.1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 2 * 4);
    assert!(text.contains(",wsm,1,1,1,"));
    assert!(text.contains(",wsm,1,0.1,0.1,"));
}

#[test]
fn config_file_and_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"scenario": {"gamma": 4}, "sweep": {"user_counts": [25], "bel_values": [0, 30], "snapshots": 1, "formulations": ["ecm"]}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = cellswitch(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--gnuplot",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
    assert!(csv.lines().skip(1).all(|l| l.contains(",ecm,")));
    assert!(fs::read_to_string(out.join("sweep.dat"))
        .unwrap()
        .starts_with('#'));
}

#[test]
fn demo_prints_report() {
    let o = cellswitch(&["demo"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("switched off: SBS"));
    assert!(text.contains("ecm constraints hold: true"));
}

#[test]
fn compare_lists_requested_solvers() {
    let o = cellswitch(&[
        "compare",
        "--users-list",
        "40",
        "--gamma",
        "4",
        "--solver",
        "greedy,ga",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with(cellswitch::harness::COMPARE_HEADER));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn scenario_export_round_trips() {
    let o = cellswitch(&["scenario", "--seed", "4"]);
    assert!(o.status.success());
    let s = cellswitch::Scenario::from_json(&stdout(&o)).unwrap();
    assert_eq!(s.seed, 4);
    assert_eq!(s.gamma(), 10);
}

#[test]
fn validation_failures_exit_nonzero_with_diagnostic() {
    let cases: [&[&str]; 4] = [
        &["sweep", "--bel-list", "45"],
        &["sweep", "--gamma", "25"],
        &["sweep", "--gnuplot"],
        &["sweep", "--config", "/nonexistent/run.json"],
    ];
    for args in cases {
        let o = cellswitch(args);
        assert!(!o.status.success(), "{args:?} succeeded");
        assert!(
            stderr(&o).contains("cellswitch"),
            "{args:?}: {}",
            stderr(&o)
        );
    }
}

#[test]
fn unknown_values_are_rejected_by_the_parser() {
    for args in [
        &["sweep", "--solver", "annealing"][..],
        &["sweep", "--formulation", "pareto"],
        &["sweep", "--weights", "2,0,0"],
        &["frobnicate"],
    ] {
        let o = cellswitch(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!stderr(&o).is_empty());
    }
}
