//! The `lab` command: run one verification suite, or all of them, against
//! a configuration file, and emit the report as JSON or CSV.
//!
//! Exit code 0 means every case in every requested suite passed, 1 means
//! the run completed but at least one case failed, and 2 means the
//! request itself was unusable (bad arguments, unreadable configuration,
//! unknown suite, missing set file).  Reports are pure functions of the
//! configuration and seed; two runs with the same inputs produce byte
//! identical output unless `--timings` is on.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use weylab_core::report::{RunReport, SuiteReport};
use weylab_core::suites::{self, SuiteError};
use weylab_core::LabConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "lab",
    about = "Numerical verification suites for Weyl transform identities",
    after_help = "Suites: hmg-plancherel, hmg-inversion, hmg-wigner, hmg-peterweyl,\n\
                  proj-hs-scaling, proj-intersection, proj-annihilate, proj-independence,\n\
                  sets-growth, quat-plancherel, quat-inversion, quat-schur, quat-twisted,\n\
                  or `all` for the full sequence."
)]
struct Cli {
    /// Suite name, or `all` for every suite in canonical order
    suite: String,

    /// Configuration file in `key = value` form
    #[arg(long)]
    config: PathBuf,

    /// Write the report to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Override the configured corpus seed
    #[arg(long)]
    seed: Option<u64>,

    /// Record wall clock seconds per suite (makes reports time dependent)
    #[arg(long)]
    timings: bool,

    /// Run the requested suites on one thread each
    #[arg(long)]
    parallel: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("lab: {err}");
            ExitCode::from(2)
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] weylab_core::ConfigError),
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error("could not write the report to {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let mut cfg = LabConfig::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        cfg.trunc.seed = seed;
    }
    let names = suites::request_names(&cli.suite)?;

    let reports = if cli.parallel && names.len() > 1 {
        run_parallel(&names, &cfg, cli.timings)?
    } else {
        let mut out = Vec::with_capacity(names.len());
        for name in &names {
            out.push(run_one(name, &cfg, cli.timings)?);
        }
        out
    };

    let report = RunReport::new(reports);
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(report.passed())
}

fn run_one(name: &str, cfg: &LabConfig, timings: bool) -> Result<SuiteReport, SuiteError> {
    let start = Instant::now();
    let mut report = suites::run(name, cfg)?;
    if timings {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}

/// Runs each suite on its own thread.  Every suite builds its own engines
/// and random streams from the shared configuration, so the reports are
/// float for float the same as a sequential run; only the wall time moves.
fn run_parallel(
    names: &[&'static str],
    cfg: &LabConfig,
    timings: bool,
) -> Result<Vec<SuiteReport>, SuiteError> {
    let mut slots: Vec<Option<Result<SuiteReport, SuiteError>>> = Vec::new();
    slots.resize_with(names.len(), || None);
    std::thread::scope(|scope| {
        for (slot, name) in slots.iter_mut().zip(names) {
            scope.spawn(move || *slot = Some(run_one(name, cfg, timings)));
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.expect("every suite thread reports"))
        .collect()
}
