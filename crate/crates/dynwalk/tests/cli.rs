use std::path::Path;
use std::process::{Command, Output};

use dynwalk::experiments::TailSweepReport;
use dynwalk::report::{csv_body, parse_json, Envelope, CSV_COLUMNS};

fn dynwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynwalk"))
        .args(args)
        .env_remove("DYNWALK_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn out_dir_args(dir: &Path) -> Vec<String> {
    vec![
        "--out-dir".into(),
        dir.display().to_string(),
        "--workers".into(),
        "2".into(),
    ]
}

fn run_in(dir: &Path, rest: &[&str]) -> Output {
    let mut args = out_dir_args(dir);
    args.extend(rest.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    dynwalk(&refs)
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(dynwalk(&["--help"]).status.code(), Some(0));
    assert_eq!(dynwalk(&["tail-sweep", "--help"]).status.code(), Some(0));
    assert_eq!(dynwalk(&[]).status.code(), Some(2));
    assert_eq!(dynwalk(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(dynwalk(&["tail-sweep", "--bogus"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = run_in(dir.path(), &["tail-sweep", "--n", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!dir.path().join("tail-sweep.json").exists());
}

#[test]
fn verdicts_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = run_in(
        dir.path(),
        &["tail-sweep", "--n", "1000", "--z", "2", "--paths", "2000"],
    );
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    // A level this low is reached far more often than the band allows.
    let fail = run_in(
        dir.path(),
        &["tail-sweep", "--n", "1000", "--z", "0.3", "--paths", "2000"],
    );
    assert_eq!(fail.status.code(), Some(1));
    let thin = [
        "tail-sweep",
        "--n",
        "1000",
        "--z",
        "4",
        "--paths",
        "1000",
        "--allow-rare",
    ];
    assert_eq!(run_in(dir.path(), &thin).status.code(), Some(0));
    let mut strict = vec!["--strict"];
    strict.extend(thin);
    assert_eq!(run_in(dir.path(), &strict).status.code(), Some(3));
    // Without the override the same run is refused up front.
    let refused = run_in(
        dir.path(),
        &["tail-sweep", "--n", "1000", "--z", "4", "--paths", "1000"],
    );
    assert_eq!(refused.status.code(), Some(2));
}

#[test]
fn json_round_trips_and_csv_has_one_row_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "tail-sweep",
            "--n",
            "500",
            "--z",
            "1.5,2,2.5",
            "--paths",
            "3000",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let json = read(dir.path(), "tail-sweep.json");
    let env: Envelope<TailSweepReport> = parse_json(&json).unwrap();
    assert_eq!(env.to_json().unwrap(), json);
    assert_eq!(env.report.rows.len(), 3);
    assert_eq!(env.seed, 42);
    assert_eq!(env.config.get("z").map(String::as_str), Some("1.5,2,2.5"));
    assert!(!env.git_describe.is_empty());

    let csv = read(dir.path(), "tail-sweep.csv");
    assert!(csv.lines().any(|l| l.starts_with("# git_describe=")));
    let body = csv_body(&csv);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some(CSV_COLUMNS));
    assert_eq!(lines.count(), 3);
    assert_eq!(env.to_csv(), csv);
}

#[test]
fn flags_override_the_config_file_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# comment\nn = 400\npaths = 2500\nseed = 7\nz = 2\n").unwrap();
    let cfg_arg = cfg.display().to_string();
    let out = run_in(
        dir.path(),
        &["--config", &cfg_arg, "tail-sweep", "--n", "300"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let env: Envelope<TailSweepReport> = parse_json(&read(dir.path(), "tail-sweep.json")).unwrap();
    assert_eq!(env.report.config.n, 300);
    assert_eq!(env.report.config.paths, 2500);
    assert_eq!(env.report.config.seed, 7);
    assert_eq!(env.report.config.slack_low, 0.5);
    assert_eq!(env.config.get("n").map(String::as_str), Some("300"));

    std::fs::write(&cfg, "n = 400\nnot_a_key = 1\n").unwrap();
    let out = run_in(dir.path(), &["--config", &cfg_arg, "tail-sweep"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn environment_supplies_the_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dynwalk"))
        .args(["--workers", "1", "integral-test"])
        .env("DYNWALK_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("integral-test.csv").exists());
}

#[test]
fn non_neighboring_blocks_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["block-moment", "--blocks", "0:0.5:0:0.5/0.6:1:0.6:1"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("neighboring"));
}

#[test]
fn simulate_path_writes_a_replayable_clock_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["simulate-path", "--n", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let first = read(dir.path(), "simulate-path.path.csv");
    let log = dir
        .path()
        .join("simulate-path.clocks.csv")
        .display()
        .to_string();
    let replay = tempfile::tempdir().unwrap();
    let out = run_in(replay.path(), &["simulate-path", "--clock-log", &log]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read(replay.path(), "simulate-path.path.csv"), first);
}

#[test]
fn csv_bodies_do_not_depend_on_the_worker_count() {
    let cases: [&[&str]; 4] = [
        &["tail-sweep", "--n", "300", "--z", "2", "--paths", "3000"],
        &["fdd-cov", "--n", "200", "--reps", "1000"],
        &[
            "quenched-tail",
            "--n",
            "300",
            "--z",
            "2",
            "--clock-seeds",
            "1,2",
            "--paths",
            "3000",
        ],
        &["reflection", "--n", "100", "--paths", "3000"],
    ];
    for case in cases {
        let mut bodies = Vec::new();
        for workers in ["1", "4", "8"] {
            let dir = tempfile::tempdir().unwrap();
            let mut args = vec![
                "--out-dir",
                dir.path().to_str().unwrap(),
                "--workers",
                workers,
            ];
            args.extend(case);
            let out = dynwalk(&args);
            assert_eq!(out.status.code(), Some(0), "{case:?}");
            bodies.push(csv_body(&read(dir.path(), &format!("{}.csv", case[0]))));
        }
        assert_eq!(bodies[0], bodies[1], "{case:?}");
        assert_eq!(bodies[0], bodies[2], "{case:?}");
    }
}
