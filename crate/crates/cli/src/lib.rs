//! Experiment runner: parses a run configuration, executes one
//! construction with a single seeded random stream, and writes a result
//! file whose `pass` flag matches the exit status.

pub mod args;
mod commands;
pub mod parse;
pub mod report;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use covering::{seeded_rng, Error};

pub use args::{Cli, Command, GlobalOpts};
pub use commands::line_intervals;
pub use report::Report;

/// Exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    Fail = 1,
    BadConfig = 2,
}

/// Outcome of [`execute`]: the status, the report (absent for bad
/// configurations) and the written result file.
#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub reason: Option<String>,
    pub report: Option<Report>,
    pub path: Option<PathBuf>,
}

/// Whether an error comes from the inputs rather than from the run.
fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter(_)
            | Error::InvalidDimension(_)
            | Error::DegenerateBody(_)
            | Error::EmptyIntersection
            | Error::Parse { .. }
            | Error::TooLarge(_)
            | Error::InfeasibleMeasure(_)
            | Error::MarginTooSmall { .. }
            | Error::InsufficientVolume { .. }
            | Error::HypothesisViolated(_)
            | Error::UncoverableElement(_)
            | Error::Io(_)
    )
}

fn build(cli: &Cli) -> covering::Result<Report> {
    let mut rng = seeded_rng(cli.global.seed);
    let g = &cli.global;
    let rng = &mut rng;
    match &cli.command {
        Command::Strips(a) => commands::strips(a, g, rng),
        Command::ThinStrips(a) => commands::thin_strips(a, rng),
        Command::Dual(a) => commands::dual(a, g, rng),
        Command::Kfold(a) => commands::kfold(a, g, rng),
        Command::Fraccover(a) => commands::fraccover(a),
        Command::CoverBody(a) => commands::cover_body_cmd(a, g),
        Command::Vitali(a) => commands::vitali(a, g),
        Command::Rings(a) => commands::rings(a, g, rng),
        Command::Epsnet(a) => commands::epsnet(a, g, rng),
        Command::Lowmult(a) => commands::lowmult(a, g, rng),
        Command::Vc(a) => commands::vc(a, rng),
        Command::Bounds(a) => commands::bounds(a),
    }
}

fn config_table(cli: &Cli) -> toml::Table {
    let mut t = toml::Table::new();
    if let Ok(toml::Value::Table(g)) = toml::Value::try_from(&cli.global) {
        t.extend(g);
    }
    if let Ok(toml::Value::Table(c)) = toml::Value::try_from(&cli.command) {
        for (_, v) in c {
            if let toml::Value::Table(inner) = v {
                t.extend(inner);
            }
        }
    }
    t
}

/// Runs a parsed configuration and writes its result files.
pub fn execute(cli: &Cli) -> Outcome {
    let name = cli.command.name();
    let (mut report, reason) = match build(cli) {
        Ok(r) => (r, None),
        Err(e) if is_config_error(&e) => {
            return Outcome {
                status: Status::BadConfig,
                reason: Some(format!("bad-config: {e}")),
                report: None,
                path: None,
            }
        }
        Err(e) => {
            let mut r = Report::new(name);
            r.set("failure", e.to_string());
            r.check("completed", false);
            (r, Some(format!("assertion-failure: {e}")))
        }
    };
    let mut config = config_table(cli);
    config.extend(std::mem::take(&mut report.config));
    report.config = config;
    let path = match report.write(&cli.global.out, cli.global.max_rows) {
        Ok(p) => p,
        Err(e) => {
            return Outcome {
                status: Status::BadConfig,
                reason: Some(format!("bad-config: cannot write results: {e}")),
                report: Some(report),
                path: None,
            }
        }
    };
    let status = if report.pass() {
        Status::Pass
    } else {
        Status::Fail
    };
    let reason = match status {
        Status::Pass => None,
        _ => reason.or_else(|| {
            let failed: Vec<&String> = report
                .checks
                .iter()
                .filter(|(_, v)| v.as_bool() != Some(true))
                .map(|(k, _)| k)
                .collect();
            Some(format!("assertion-failure: failed checks {failed:?}"))
        }),
    };
    Outcome {
        status,
        reason,
        report: Some(report),
        path: Some(path),
    }
}

/// Parses `args` (program name first), runs, prints the reason line on
/// failure and returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let _ = e.print();
            let first = e.to_string().lines().next().unwrap_or("").to_string();
            eprintln!("reason: bad-config: {first}");
            return Status::BadConfig as i32;
        }
    };
    let out = execute(&cli);
    if let Some(reason) = &out.reason {
        eprintln!("reason: {reason}");
    }
    if let Some(p) = &out.path {
        println!("{}", p.display());
    }
    out.status as i32
}
