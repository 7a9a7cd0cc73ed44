//! Machine readable verification reports.
//!
//! Every suite run produces one [`SuiteReport`]: the configuration echoed
//! back, one [`CaseReport`] per checked quantity, and an optional wall
//! time.  A run of several suites wraps them in a [`RunReport`].  The JSON
//! form is canonical: field order follows the struct declarations, floats
//! print in shortest round trip notation, and the same configuration and
//! seed reproduce the bytes exactly.  Wall times are `null` unless timing
//! was requested, precisely so that timed quantities never break byte
//! reproducibility by default.

use serde::Serialize;

use crate::config::TruncationConfig;

/// One measured quantity.  `expected` and `rel_err` are present when the
/// case checks a value against a prediction; a case that certifies a bound
/// or a count carries the measurement and the verdict alone.
#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub expected: Option<f64>,
    pub measured: f64,
    pub rel_err: Option<f64>,
    pub pass: bool,
}

impl CaseReport {
    /// A case that compares `measured` against `expected` at relative
    /// tolerance `tol`.
    pub fn with_expected(name: impl Into<String>, expected: f64, measured: f64, tol: f64) -> Self {
        let rel = relative_error(expected, measured);
        Self {
            name: name.into(),
            expected: Some(expected),
            measured,
            rel_err: Some(rel),
            pass: rel <= tol,
        }
    }

    /// A case whose verdict was decided by the caller: a certified bound,
    /// a count of violations, a rank.
    pub fn observed(name: impl Into<String>, measured: f64, pass: bool) -> Self {
        Self { name: name.into(), expected: None, measured, rel_err: None, pass }
    }
}

/// The outcome of one suite under one configuration.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: TruncationConfig,
    pub cases: Vec<CaseReport>,
    pub wall_time: Option<f64>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, config: &TruncationConfig) -> Self {
        Self { suite: suite.into(), config: config.clone(), cases: Vec::new(), wall_time: None }
    }

    pub fn push(&mut self, case: CaseReport) {
        self.cases.push(case);
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }
}

/// An ordered collection of suite reports, the top level JSON object.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub suites: Vec<SuiteReport>,
}

impl RunReport {
    pub fn new(suites: Vec<SuiteReport>) -> Self {
        Self { suites }
    }

    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed())
    }

    /// Canonical JSON: pretty printed, trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialisation");
        out.push('\n');
        out
    }

    /// Flat CSV, one row per case; empty fields where the JSON has null.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,case,expected,measured,rel_err,pass\n");
        for suite in &self.suites {
            for case in &suite.cases {
                let expected = case.expected.map(fmt_f64).unwrap_or_default();
                let rel = case.rel_err.map(fmt_f64).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    suite.suite,
                    case.name,
                    expected,
                    fmt_f64(case.measured),
                    rel,
                    case.pass
                ));
            }
        }
        out
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Relative error `|measured - expected| / |expected|`, falling back to
/// the absolute error when the expectation is zero.
pub fn relative_error(expected: f64, measured: f64) -> f64 {
    if expected == 0.0 {
        measured.abs()
    } else {
        (measured - expected).abs() / expected.abs()
    }
}
