//! Library side of the `tra` command: argument parsing, the job runner and
//! the report formats.

pub mod commands;
pub mod config;
pub mod output;
pub mod parse;

use std::fmt;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::Serialize;
use tra_core::Error;

use config::{Cli, Format, JobConfig};
use output::{Diagnostics, Report, SCHEMA_VERSION};

/// A failure with its exit status: 1 for I/O, 2 for invalid input, 3 for numerics.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub exit_code: u8,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { kind: "usage".into(), message: message.into(), exit_code: 2 }
    }

    fn io(message: impl Into<String>) -> Self {
        Self { kind: "io".into(), message: message.into(), exit_code: 1 }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (kind, exit_code) = match &e {
            Error::Domain(_) => ("domain", 2),
            Error::ParameterRange(_) => ("parameter_range", 2),
            Error::DegreeOutOfRange { .. } => ("degree_out_of_range", 2),
            Error::UnsupportedFamily(_) => ("unsupported", 2),
            Error::Regime(_) => ("regime", 2),
            Error::InvalidRoute { .. } => ("invalid_route", 2),
            Error::Constraint(_) => ("constraint", 2),
            Error::NoBoundStates(_) => ("no_bound_states", 2),
            Error::NotTerminating(_) => ("not_terminating", 2),
            Error::DegreeCap { .. } => ("degree_cap", 2),
            Error::QuadratureNonConvergence { .. } => ("quadrature_non_convergence", 3),
            Error::EigenFailure(_) => ("eigen_failure", 3),
            Error::IllConditionedFit(_) => ("ill_conditioned_fit", 3),
            Error::Pole { .. } => ("pole", 3),
            Error::ZeroDenominator { .. } => ("zero_denominator", 3),
        };
        Self { kind: kind.into(), message: e.to_string(), exit_code }
    }
}

/// Parses `args` (program name first), runs the job and writes its output.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            return write_stdout(&e.to_string());
        }
        Err(e) => return Err(CliError::usage(e.to_string().trim_end())),
    };
    let (command, common) = cli.command.into_parts();
    let job = JobConfig::from_args(command, common)?;
    let outcome = commands::run(&job)?;

    let text = match job.format {
        Format::Json => {
            let timestamp = if job.reproducible {
                None
            } else {
                SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
            };
            let report = Report {
                schema_version: SCHEMA_VERSION,
                command: command.name().into(),
                inputs: job.clone(),
                results: outcome.results,
                diagnostics: Diagnostics { timestamp, settings: outcome.settings, notes: outcome.notes },
            };
            output::to_json(&report).map_err(|e| CliError::io(e.to_string()))?
        }
        Format::Csv => output::to_csv(&outcome.table).map_err(|e| CliError::io(e.to_string()))?,
    };
    match &job.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(format!("{path}: {e}"))),
        None => write_stdout(&text),
    }
}

// A closed pipe (`tra ... | head`) is not an error.
fn write_stdout(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io(e.to_string())),
        _ => Ok(()),
    }
}
