//! Behavioural tests for the `lab` binary: argument handling, exit
//! codes, report formats, and output routing.  These run the cheapest
//! suite so they stay fast; the full scale runs live in the acceptance
//! tests.

use std::path::Path;
use std::process::{Command, Output};

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lab"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("lab.cfg");
    let text = "\
hermite_cutoff = 16
buffer = 12
theta_samples = 32
quad_radius = 7.0
quad_points = 140
fock_degree = 6
quat_quad_points = 8
a_magnitude = 1.0
tol = 1e-10
seed = 99
";
    std::fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("the lab binary runs")
}

#[test]
fn passing_run_exits_zero_and_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = run(lab().args(["sets-growth", "--config"]).arg(&cfg));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with('{') && text.ends_with('\n'));
    assert!(text.contains("\"suite\": \"sets-growth\""));
    assert!(text.contains("\"wall_time\": null"));
    assert!(text.contains("\"pass\": true"));
}

#[test]
fn unknown_suites_are_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = run(lab().args(["sets-grow", "--config"]).arg(&cfg));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sets-grow"), "stderr names the bad suite: {err}");
}

#[test]
fn unreadable_and_invalid_configs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = run(lab().args(["sets-growth", "--config"]).arg(dir.path().join("nope.cfg")));
    assert_eq!(missing.status.code(), Some(2));

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "hermite_cutoff = words\n").unwrap();
    let invalid = run(lab().args(["sets-growth", "--config"]).arg(&bad));
    assert_eq!(invalid.status.code(), Some(2));

    let flag = run(lab().args(["sets-growth", "--no-such-flag"]));
    assert_eq!(flag.status.code(), Some(2));
}

#[test]
fn suites_needing_sets_fail_cleanly_without_them() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = run(lab().args(["proj-hs-scaling", "--config"]).arg(&cfg));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("hmg_square_set"), "stderr names the missing key: {err}");
}

#[test]
fn reports_route_to_a_file_and_leave_stdout_empty() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let report = dir.path().join("report.json");
    let out = run(lab().args(["sets-growth", "--config"]).arg(&cfg).arg("--out").arg(&report));
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("\"suite\": \"sets-growth\""));
}

#[test]
fn csv_reports_have_one_row_per_case() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = run(lab().args(["sets-growth", "--config", cfg.to_str().unwrap(), "--format", "csv"]));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "suite,case,expected,measured,rel_err,pass");
    assert!(lines.len() > 2);
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 6, "malformed row {line:?}");
        assert!(line.starts_with("sets-growth,"));
    }
}

#[test]
fn the_seed_flag_overrides_the_configured_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let base = run(lab().args(["sets-growth", "--config"]).arg(&cfg));
    let same = run(lab().args(["sets-growth", "--config"]).arg(&cfg).args(["--seed", "99"]));
    let other = run(lab().args(["sets-growth", "--config"]).arg(&cfg).args(["--seed", "7"]));
    assert_eq!(base.stdout, same.stdout, "the configured seed and its explicit copy agree");
    assert_ne!(base.stdout, other.stdout, "a fresh seed draws a fresh corpus");
    assert_eq!(other.status.code(), Some(0));
}

#[test]
fn timings_are_off_by_default_and_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let timed = run(lab().args(["sets-growth", "--config"]).arg(&cfg).arg("--timings"));
    assert_eq!(timed.status.code(), Some(0));
    let text = String::from_utf8(timed.stdout).unwrap();
    assert!(!text.contains("\"wall_time\": null"), "timed runs record a duration");
    assert!(text.contains("\"wall_time\":"));
}
