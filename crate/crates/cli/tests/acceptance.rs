//! End to end acceptance checks against the shipped default
//! configuration.  Each test runs one verification suite exactly as the
//! `lab` binary would, asserts every reported case passed at the suite's
//! stated tolerance, pins the corpus sizes so the suites cannot silently
//! shrink, and holds the run to its wall clock budget.
//!
//! The checks serialise through a lock so the budgets measure a
//! single suite on an otherwise idle process, matching how the binary
//! runs them.

use std::sync::{Mutex, PoisonError};
use std::time::{Duration, Instant};

use weylab_core::report::SuiteReport;
use weylab_core::{suites, LabConfig};

static SERIAL: Mutex<()> = Mutex::new(());

fn default_config() -> LabConfig {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../config/default.cfg");
    LabConfig::load(path.as_ref()).expect("the shipped default configuration loads")
}

/// Runs one suite under the serialisation lock and asserts every case
/// passed within the wall clock budget.
fn run_within(name: &str, budget: Duration) -> SuiteReport {
    let _guard = SERIAL.lock().unwrap_or_else(PoisonError::into_inner);
    let cfg = default_config();
    let start = Instant::now();
    let report = suites::run(name, &cfg).expect("suite runs");
    let elapsed = start.elapsed();
    let failed: Vec<&str> = report
        .cases
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    assert!(failed.is_empty(), "{name} failed cases: {failed:?}");
    assert!(
        elapsed <= budget,
        "{name} took {elapsed:?}, over the {budget:?} budget"
    );
    report
}

fn cases_named<'r>(report: &'r SuiteReport, fragment: &str) -> Vec<&'r weylab_core::CaseReport> {
    report.cases.iter().filter(|c| c.name.contains(fragment)).collect()
}

#[test]
fn wigner_orthogonality_across_twenty_quadruples() {
    let report = run_within("hmg-wigner", Duration::from_secs(60));
    assert_eq!(cases_named(&report, "_match").len(), 20);
    assert_eq!(cases_named(&report, "_cross_sector").len(), 20);
}

#[test]
fn plancherel_balance_and_conjugate_witness() {
    let report = run_within("hmg-plancherel", Duration::from_secs(120));
    assert_eq!(cases_named(&report, "_mass").len(), 20 + 2);
    assert_eq!(cases_named(&report, "_balance").len(), 20);
    let two_pi = 2.0 * std::f64::consts::PI;
    for witness in cases_named(&report, "conjugate_witness") {
        assert_eq!(witness.expected, Some(two_pi));
    }
    assert_eq!(cases_named(&report, "conjugate_witness").len(), 2);
}

#[test]
fn inversion_round_trip_in_relative_l2() {
    let report = run_within("hmg-inversion", Duration::from_secs(120));
    assert_eq!(cases_named(&report, "_roundtrip").len(), 10);
}

#[test]
fn sector_projection_recovers_components() {
    let report = run_within("hmg-peterweyl", Duration::from_secs(120));
    assert_eq!(cases_named(&report, "_extraction").len(), 5);
    assert_eq!(cases_named(&report, "_idempotent").len(), 5);
    assert_eq!(cases_named(&report, "_transform_consistency").len(), 5);
}

#[test]
fn hilbert_schmidt_norms_scale_linearly_in_the_window() {
    let report = run_within("proj-hs-scaling", Duration::from_secs(180));
    // Three planar sets and three quaternion sets, eight window ranks
    // each, a kernel-versus-frobenius agreement and a prediction per
    // rank, plus the refitted quaternion weight against its closed form.
    assert_eq!(cases_named(&report, "_paths").len(), 6 * 8);
    assert_eq!(cases_named(&report, "_prediction").len(), 6 * 8);
    assert_eq!(cases_named(&report, "fitted_weight").len(), 1);
}

#[test]
fn set_growth_gains_at_least_half_the_budget() {
    let report = run_within("sets-growth", Duration::from_secs(5));
    assert_eq!(cases_named(&report, "instance_").len(), 10);
    assert_eq!(cases_named(&report, "telescoping").len(), 1);
}

#[test]
fn cut_window_compressions_contract_strictly() {
    let report = run_within("proj-intersection", Duration::from_secs(120));
    // Four set and backend choices at two window ranks each.
    assert_eq!(cases_named(&report, "_sigma").len(), 8);
    assert_eq!(cases_named(&report, "_contraction").len(), 8);
    assert_eq!(cases_named(&report, "_limit_rank").len(), 8);
}

#[test]
fn translated_range_vectors_stay_independent() {
    let report = run_within("proj-independence", Duration::from_secs(60));
    // Three enlargement rounds plus the original on both backends.
    assert_eq!(cases_named(&report, "_rank").len(), 2);
    assert_eq!(cases_named(&report, "_eigen_floor").len(), 2);
    assert_eq!(cases_named(&report, "_guaranteed_gains").len(), 2);
}

#[test]
fn quaternion_plancherel_constant_at_both_moduli() {
    let _guard = SERIAL.lock().unwrap_or_else(PoisonError::into_inner);
    let cfg = default_config();
    assert_eq!(cfg.trunc.fock_degree, 6);
    assert_eq!(cfg.trunc.quat_quad_points, 12);

    let start = Instant::now();
    let plancherel = suites::run("quat-plancherel", &cfg).expect("suite runs");
    let inversion = suites::run("quat-inversion", &cfg).expect("suite runs");
    let elapsed = start.elapsed();

    for report in [&plancherel, &inversion] {
        let failed: Vec<&str> = report
            .cases
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        assert!(failed.is_empty(), "{} failed cases: {failed:?}", report.suite);
    }
    assert_eq!(cases_named(&plancherel, "a_half_").len(), 20);
    assert_eq!(cases_named(&plancherel, "a_unit_").len(), 20);
    assert_eq!(cases_named(&inversion, "_roundtrip").len(), 10);
    assert!(
        elapsed <= Duration::from_secs(300),
        "quaternion transform checks took {elapsed:?}, over the 300s budget"
    );
}

#[test]
fn schur_orthogonality_and_the_unit_witness() {
    let report = run_within("quat-schur", Duration::from_secs(120));
    assert_eq!(cases_named(&report, "_spread").len(), 10);
    let witness = cases_named(&report, "witness_norm");
    assert_eq!(witness.len(), 1);
    assert_eq!(witness[0].expected, Some(1.0));
}

#[test]
fn twisted_convolution_realises_operator_products() {
    let report = run_within("quat-twisted", Duration::from_secs(120));
    assert_eq!(cases_named(&report, "_product").len(), 5);
    assert_eq!(cases_named(&report, "_intertwine").len(), 2);
}

#[test]
fn annihilation_certificates_report_no_violations() {
    let report = run_within("proj-annihilate", Duration::from_secs(60));
    for backend in ["hmg_square", "quat_cube"] {
        for kind in ["_mixture_violations", "_supported_violations"] {
            let name = format!("{backend}{kind}");
            let case = report
                .cases
                .iter()
                .find(|c| c.name == name)
                .unwrap_or_else(|| panic!("{name} is reported"));
            assert_eq!(case.measured, 0.0, "{name} counted violations");
        }
    }
}

#[test]
fn full_runs_repeat_byte_for_byte() {
    let _guard = SERIAL.lock().unwrap_or_else(PoisonError::into_inner);
    let bin = env!("CARGO_BIN_EXE_lab");
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../config/default.cfg");
    let run = || {
        let out = std::process::Command::new(bin)
            .args(["all", "--config", config])
            .output()
            .expect("the lab binary runs");
        assert!(out.status.success(), "lab all failed: {}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let first = run();
    let second = run();
    assert!(!first.is_empty());
    assert_eq!(first, second, "two identical requests must print identical reports");
}
