//! Command-line arguments and the job configuration echoed into every report.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tra_core::asymptotics::FitWindow;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "tra", version, about = "Orthogonal-polynomial spectra, phase shifts and tridiagonal bases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Closed-form bound states next to the Rayleigh-Ritz oracle.
    Spectrum(Common),
    /// Phase shifts over an energy grid, optionally with a large-n fit.
    Phaseshift(Common),
    /// Orthogonality defect matrix of a polynomial family.
    Orthocheck(Common),
    /// Tridiagonality audit of the model bases (all of them without --model).
    Tridiag(Common),
    /// Wavefunction sampled on an x grid.
    Wavefunction(Common),
    /// Polynomial values by recursion and by closed form.
    PolyEval(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Phaseshift,
    Orthocheck,
    Tridiag,
    Wavefunction,
    PolyEval,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Phaseshift => "phaseshift",
            Command::Orthocheck => "orthocheck",
            Command::Tridiag => "tridiag",
            Command::Wavefunction => "wavefunction",
            Command::PolyEval => "poly-eval",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Potential model (coulomb, oscillator, morse, poschl_teller, trig_scarf, eckart, rosen_morse, log_spectrum, table1).
    #[arg(long)]
    pub model: Option<String>,
    /// Polynomial family (mp, meixner, krawtchouk, cdh, dual_hahn, wilson, racah, h_poly).
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, value_parser = ["mp", "cdh", "wilson"])]
    pub route: Option<String>,
    /// Model or family parameter, `key=value` (repeatable).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Basis size (spectrum, tridiag) or expansion truncation (wavefunction).
    #[arg(long = "M", value_name = "M")]
    pub size: Option<usize>,
    /// Highest level index listed for infinite spectra.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Highest polynomial degree (orthocheck, poly-eval).
    #[arg(long)]
    pub degree: Option<usize>,
    /// `start:stop:count`: energies (phaseshift), x values (wavefunction), arguments (poly-eval).
    #[arg(long)]
    pub grid: Option<Grid>,
    /// Bound-state index (wavefunction).
    #[arg(long)]
    pub state: Option<usize>,
    /// Single energy (phaseshift, continuum wavefunction).
    #[arg(long)]
    pub energy: Option<f64>,
    /// Add the large-n fit columns (phaseshift).
    #[arg(long)]
    pub fit: bool,
    /// Exponent shift of the negative-control basis (tridiag).
    #[arg(long)]
    pub control_shift: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<String>,
    /// Omit the timestamp so identical inputs give byte-identical output.
    #[arg(long)]
    pub reproducible: bool,
    /// Recorded for provenance; sampling-based checks derive from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Quadrature tolerance (matrix assembly and continuous orthogonality).
    #[arg(long)]
    pub tol_quad: Option<f64>,
    /// Off-band defect below which a matrix counts as tridiagonal.
    #[arg(long)]
    pub tol_tridiag: Option<f64>,
    /// Relative oracle-vs-closed-form deviation flagged in the diagnostics.
    #[arg(long)]
    pub tol_oracle: Option<f64>,
    /// Lower end of the large-n fit window.
    #[arg(long)]
    pub tol_fit_lo: Option<usize>,
    /// Upper end of the large-n fit window.
    #[arg(long)]
    pub tol_fit_hi: Option<usize>,
    /// Number of fitted degrees.
    #[arg(long)]
    pub tol_fit_samples: Option<usize>,
}

/// `start:stop:count`, evenly spaced and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count).map(|i| self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64).collect()
    }
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("grid '{s}' is not start:stop:count"));
        };
        let start: f64 = a.trim().parse().map_err(|_| format!("bad grid start '{a}'"))?;
        let stop: f64 = b.trim().parse().map_err(|_| format!("bad grid stop '{b}'"))?;
        let count: usize = n.trim().parse().map_err(|_| format!("bad grid count '{n}'"))?;
        if count == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(format!("grid '{s}' needs finite ends and a positive count"));
        }
        Ok(Grid { start, stop, count })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// Tolerances in force for a job, defaults filled in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub quadrature: f64,
    pub tridiagonal: f64,
    pub oracle_relative: f64,
    pub fit_window: FitWindow,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { quadrature: 1e-12, tridiagonal: 1e-7, oracle_relative: 1e-6, fit_window: FitWindow::default() }
    }
}

/// Everything a job depends on; echoed as `inputs` and re-parseable from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: Command,
    pub model: Option<String>,
    pub family: Option<String>,
    pub route: Option<String>,
    pub params: BTreeMap<String, f64>,
    #[serde(rename = "M")]
    pub size: Option<usize>,
    pub kmax: Option<usize>,
    pub degree: Option<usize>,
    pub grid: Option<Grid>,
    pub state: Option<usize>,
    pub energy: Option<f64>,
    pub fit: bool,
    pub control_shift: Option<f64>,
    pub tolerances: Tolerances,
    pub format: Format,
    pub out: Option<String>,
    pub seed: u64,
    pub reproducible: bool,
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for item in raw {
        let (k, v) = item.split_once('=').ok_or_else(|| CliError::usage(format!("parameter '{item}' is not key=value")))?;
        let key = k.trim().to_string();
        let value: f64 = v.trim().parse().map_err(|_| CliError::usage(format!("parameter {key} = '{v}' is not a number")))?;
        if !value.is_finite() {
            return Err(CliError::usage(format!("parameter {key} must be finite")));
        }
        if out.insert(key.clone(), value).is_some() {
            return Err(CliError::usage(format!("parameter {key} given twice")));
        }
    }
    Ok(out)
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(format!("{name} must be positive, got {v}")))
    }
}

impl JobConfig {
    pub fn from_args(command: Command, a: Common) -> Result<Self, CliError> {
        let mut tol = Tolerances::default();
        if let Some(t) = a.tol_quad {
            tol.quadrature = positive("--tol-quad", t)?;
        }
        if let Some(t) = a.tol_tridiag {
            tol.tridiagonal = positive("--tol-tridiag", t)?;
        }
        if let Some(t) = a.tol_oracle {
            tol.oracle_relative = positive("--tol-oracle", t)?;
        }
        if let Some(n) = a.tol_fit_lo {
            tol.fit_window.n_lo = n;
        }
        if let Some(n) = a.tol_fit_hi {
            tol.fit_window.n_hi = n;
        }
        if let Some(n) = a.tol_fit_samples {
            tol.fit_window.samples = n;
        }
        if a.size == Some(0) {
            return Err(CliError::usage("--M must be positive"));
        }
        if let Some(s) = a.control_shift {
            positive("--control-shift", s.abs())?;
        }
        Ok(JobConfig {
            command,
            model: a.model.map(|m| m.replace('-', "_").to_ascii_lowercase()),
            family: a.family.map(|f| f.replace('-', "_").to_ascii_lowercase()),
            route: a.route,
            params: parse_params(&a.params)?,
            size: a.size,
            kmax: a.kmax,
            degree: a.degree,
            grid: a.grid,
            state: a.state,
            energy: a.energy,
            fit: a.fit,
            control_shift: a.control_shift,
            tolerances: tol,
            format: a.format,
            out: a.out,
            seed: a.seed,
            reproducible: a.reproducible,
        })
    }
}

impl CommandArgs {
    pub fn into_parts(self) -> (Command, Common) {
        match self {
            CommandArgs::Spectrum(c) => (Command::Spectrum, c),
            CommandArgs::Phaseshift(c) => (Command::Phaseshift, c),
            CommandArgs::Orthocheck(c) => (Command::Orthocheck, c),
            CommandArgs::Tridiag(c) => (Command::Tridiag, c),
            CommandArgs::Wavefunction(c) => (Command::Wavefunction, c),
            CommandArgs::PolyEval(c) => (Command::PolyEval, c),
        }
    }
}
