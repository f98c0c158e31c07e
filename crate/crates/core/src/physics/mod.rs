//! Potentials, their polynomial parameters, spectra and phase shifts.
//!
//! Units are atomic (`ħ = M = 1`). Each potential is tied to one or two
//! polynomial routes: Meixner–Pollaczek, continuous dual Hahn or Wilson.

pub mod basis;
mod oracle;

pub use basis::{assemble, generalized_eigen, BasisShape, BasisSpec, BasisValues, Coordinate, MatrixPair, YPoint};
pub use oracle::{
    basis_for, basis_eval, basis_size_limit, eigen_oracle_spectrum, hamiltonian_matrix, max_basis_size, reconstruct_wavefunction,
    representative_models, setup,
    table1_basis, table1_samples, tridiagonality_audit, tridiagonality_defect, EigenOracleResult, EnergyLabel, MatrixOptions,
    Setup, TridiagAudit, WavefunctionSample, MAX_TRUNCATION, NORM_TRUNCATION_CAP,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{wrap_phase, ScatteringMethod, ScatteringResult};
use crate::error::{Error, Result};
use crate::polyfam::FamilyParams;
use crate::specfun::arg_gamma;
use crate::spectra::{Level, SpectrumResult};

/// Default Wilson-route basis parameter `a = b`.
pub const DEFAULT_WILSON_A: f64 = 0.5;
/// Default free Laguerre index of the continuous-dual-Hahn Morse basis.
pub const DEFAULT_NU: f64 = 1.0;

fn default_lambda() -> f64 {
    1.0
}

/// A named potential with its physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialModel {
    /// `V = Z/r` plus the centrifugal term; `Z < 0` is attractive.
    Coulomb {
        #[serde(rename = "Z")]
        charge: f64,
        ell: u32,
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default)]
        nu: Option<f64>,
    },
    /// `V = ½ω²r²` plus the centrifugal term.
    Oscillator {
        omega: f64,
        ell: u32,
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default)]
        nu: Option<f64>,
    },
    /// `V = V₀e^{2αx} + V₁e^{αx}` on the whole line.
    Morse {
        v0: f64,
        v1: f64,
        alpha: f64,
        #[serde(default)]
        nu: Option<f64>,
    },
    /// `V = V₀/cosh²(λx) + V₁/sinh²(λx)`, `x ≥ 0`.
    PoschlTeller {
        v0: f64,
        v1: f64,
        lambda: f64,
        #[serde(default)]
        a: Option<f64>,
    },
    /// `V = V₀ + (V₊ − V₋ sin λx)/cos²(λx)`, `|x| ≤ π/2λ`.
    TrigScarf {
        v0: f64,
        v_plus: f64,
        v_minus: f64,
        lambda: f64,
        #[serde(default)]
        a: Option<f64>,
    },
    /// `V = [V₀ + V₁/(1 − e^{−λx})]/(e^{λx} − 1)`, `x ≥ 0`.
    Eckart {
        v0: f64,
        v1: f64,
        lambda: f64,
        #[serde(default)]
        a: Option<f64>,
    },
    /// `(2/λ²)V = [(B² + A² + A) − B(2A+1)cosh λx]/sinh² λx`, `x ≥ 0`.
    RosenMorse {
        #[serde(rename = "A")]
        depth: f64,
        #[serde(rename = "B")]
        barrier: f64,
        lambda: f64,
        #[serde(default)]
        a: Option<f64>,
    },
    /// The exponential spectrum `E_k = ½λ²e^{−2(k+μ)}` with no known potential.
    LogSpectrum { mu: f64, lambda: f64 },
    /// One of the seven `H_n`-class potentials; `scale` is `λ` or the box length `L`.
    Table1 {
        row: u8,
        #[serde(default)]
        v0: f64,
        #[serde(default)]
        v1: f64,
        #[serde(default)]
        v_plus: f64,
        #[serde(default)]
        v_minus: f64,
        scale: f64,
    },
}

/// Which polynomial class carries the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Mp,
    Cdh,
    Wilson,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::Mp => "mp",
            Route::Cdh => "cdh",
            Route::Wilson => "wilson",
        }
    }
}

impl std::str::FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mp" => Ok(Route::Mp),
            "cdh" => Ok(Route::Cdh),
            "wilson" => Ok(Route::Wilson),
            other => Err(Error::ParameterRange(format!("unknown route '{other}' (mp | cdh | wilson)"))),
        }
    }
}

fn constraint(msg: impl Into<String>) -> Error {
    Error::Constraint(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterRange(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterRange(format!("{name} must be finite, got {v}")))
    }
}

impl PotentialModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Coulomb { .. } => "coulomb",
            Self::Oscillator { .. } => "oscillator",
            Self::Morse { .. } => "morse",
            Self::PoschlTeller { .. } => "poschl_teller",
            Self::TrigScarf { .. } => "trig_scarf",
            Self::Eckart { .. } => "eckart",
            Self::RosenMorse { .. } => "rosen_morse",
            Self::LogSpectrum { .. } => "log_spectrum",
            Self::Table1 { .. } => "table1",
        }
    }

    pub fn routes(&self) -> &'static [Route] {
        match self {
            Self::Coulomb { .. } | Self::Oscillator { .. } | Self::Morse { .. } => &[Route::Mp, Route::Cdh],
            Self::PoschlTeller { .. } | Self::TrigScarf { .. } | Self::Eckart { .. } | Self::RosenMorse { .. } => &[Route::Wilson],
            Self::LogSpectrum { .. } => &[Route::Mp],
            Self::Table1 { .. } => &[],
        }
    }

    pub fn default_route(&self) -> Option<Route> {
        self.routes().first().copied()
    }

    /// Wilson-route basis parameter, defaulted when not configured.
    pub fn wilson_a(&self) -> f64 {
        match *self {
            Self::PoschlTeller { a, .. } | Self::TrigScarf { a, .. } | Self::Eckart { a, .. } | Self::RosenMorse { a, .. } => {
                a.unwrap_or(DEFAULT_WILSON_A)
            }
            _ => DEFAULT_WILSON_A,
        }
    }

    /// Free Laguerre index for the continuous-dual-Hahn bases. The Coulomb and
    /// oscillator defaults give the basis the regular `r^{ℓ+1}` behaviour at the
    /// origin, which is what makes the Rayleigh–Ritz oracle converge quickly.
    pub fn cdh_nu(&self) -> f64 {
        match *self {
            Self::Coulomb { nu, ell, .. } => nu.unwrap_or(2.0 * ell as f64),
            Self::Oscillator { nu, ell, .. } => nu.unwrap_or(ell as f64 - 0.5),
            Self::Morse { nu, .. } => nu.unwrap_or(DEFAULT_NU),
            _ => DEFAULT_NU,
        }
    }

    /// Route-independent parameter checks.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Coulomb { charge, lambda, nu, .. } => {
                finite("Z", charge)?;
                positive("lambda", lambda)?;
                check_nu(nu)
            }
            Self::Oscillator { omega, lambda, nu, .. } => {
                positive("omega", omega)?;
                positive("lambda", lambda)?;
                if lambda * lambda >= 4.0 * omega {
                    return Err(constraint(format!("oscillator basis needs lambda^2 < 4 omega (lambda = {lambda}, omega = {omega})")));
                }
                check_nu(nu)
            }
            Self::Morse { v0, v1, alpha, nu } => {
                positive("V0", v0)?;
                finite("V1", v1)?;
                positive("alpha", alpha)?;
                if v0 < alpha * alpha / 8.0 {
                    return Err(constraint(format!("Morse needs V0 >= alpha^2/8 = {} (V0 = {v0})", alpha * alpha / 8.0)));
                }
                check_nu(nu)
            }
            Self::PoschlTeller { v0, v1, lambda, a } => {
                positive("lambda", lambda)?;
                finite("V0", v0)?;
                finite("V1", v1)?;
                let (u0, u1) = (v0 / (lambda * lambda), v1 / (lambda * lambda));
                if u0 > 0.125 {
                    return Err(constraint(format!("Poschl-Teller needs V0/lambda^2 <= 1/8, got {u0}")));
                }
                if u1 < -0.125 {
                    return Err(constraint(format!("Poschl-Teller needs V1/lambda^2 >= -1/8, got {u1}")));
                }
                check_a(a)
            }
            Self::TrigScarf { v0, v_plus, v_minus, lambda, a } => {
                positive("lambda", lambda)?;
                finite("V0", v0)?;
                let (up, um) = (2.0 * v_plus / (lambda * lambda), 2.0 * v_minus / (lambda * lambda));
                if !(up + um >= -0.25 && up - um >= -0.25) {
                    return Err(constraint(format!("Scarf needs u+ +- u- >= -1/4 (u+ = {up}, u- = {um})")));
                }
                check_a(a)
            }
            Self::Eckart { v0, v1, lambda, a } => {
                positive("lambda", lambda)?;
                finite("V0", v0)?;
                let u1 = 2.0 * v1 / (lambda * lambda);
                if !(4.0 * u1 + 1.0 >= 0.0) {
                    return Err(constraint(format!("Eckart needs 4 u1 + 1 >= 0, got u1 = {u1}")));
                }
                check_a(a)
            }
            Self::RosenMorse { depth, barrier, lambda, a } => {
                positive("lambda", lambda)?;
                finite("A", depth)?;
                finite("B", barrier)?;
                check_a(a)
            }
            Self::LogSpectrum { mu, lambda } => {
                positive("lambda", lambda)?;
                if !(mu < 0.0) || !mu.is_finite() {
                    return Err(constraint(format!("the exponential spectrum needs mu < 0, got {mu}")));
                }
                Ok(())
            }
            Self::Table1 { row, v0, v1, v_plus, v_minus, scale } => {
                if !(1..=7).contains(&row) {
                    return Err(Error::ParameterRange(format!("table1 row must be 1..7, got {row}")));
                }
                for (n, v) in [("V0", v0), ("V1", v1), ("V+", v_plus), ("V-", v_minus)] {
                    finite(n, v)?;
                }
                positive("scale", scale)
            }
        }
    }

    fn check_route(&self, route: Route) -> Result<()> {
        if self.routes().contains(&route) {
            Ok(())
        } else {
            Err(Error::InvalidRoute { model: self.name(), route: route.name() })
        }
    }

    /// Validation including the route-specific constraints.
    pub fn validate_for(&self, route: Route) -> Result<()> {
        self.validate()?;
        self.check_route(route)?;
        if let (Self::Morse { v0, alpha, .. }, Route::Cdh) = (*self, route) {
            let target = alpha * alpha / 8.0;
            if (v0 - target).abs() > 1e-12 * target {
                return Err(constraint(format!("the continuous dual Hahn Morse route needs V0 = alpha^2/8 = {target} (V0 = {v0})")));
            }
        }
        Ok(())
    }
}

fn check_nu(nu: Option<f64>) -> Result<()> {
    match nu {
        Some(v) if !(v > -1.0) => Err(Error::ParameterRange(format!("basis index nu must exceed -1, got {v}"))),
        _ => Ok(()),
    }
}

fn check_a(a: Option<f64>) -> Result<()> {
    match a {
        Some(v) if !(v > 0.0) => Err(Error::ParameterRange(format!("Wilson basis parameter a must be positive, got {v}"))),
        _ => Ok(()),
    }
}

/// Parameters of the polynomial attached to a model at one energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialMap {
    pub route: Route,
    /// The polynomial whose values are the expansion coefficients: the
    /// continuous family for scattering states, its discrete version (Meixner,
    /// Krawtchouk) for bound states where one exists.
    pub family: FamilyParams,
    /// `μ` of the continuous family.
    pub mu: f64,
    /// Spectral variable `z`; purely imaginary for bound states.
    pub z: Complex64,
    /// The argument passed to `family`: `z`, `z²` or the discrete node `k`.
    pub argument: f64,
    /// Set for the discrete (`z → iz`, `θ → iθ`) regime.
    pub bound: bool,
    /// `s` in the pole condition `(k + μ) + i s z = 0`.
    pub pole_sign: f64,
}

impl PolynomialMap {
    /// `|(k + μ) + i s z_k|`; vanishes at bound-state energies.
    pub fn pole_residual(&self, k: usize) -> f64 {
        (Complex64::new(k as f64 + self.mu, 0.0) + Complex64::i() * self.pole_sign * self.z).norm()
    }
}

fn theta_from_cosh(c: f64) -> Result<f64> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::Regime(format!("cosh(theta) = {c} must exceed 1 in the discrete regime")));
    }
    Ok(c.acosh())
}

fn imag(v: f64) -> Complex64 {
    Complex64::new(0.0, v)
}

/// Polynomial parameters of `model` along `route` at energy `energy`.
pub fn map_to_polynomial(model: &PotentialModel, route: Route, energy: f64) -> Result<PolynomialMap> {
    model.validate_for(route)?;
    if !energy.is_finite() {
        return Err(Error::Domain(format!("energy must be finite, got {energy}")));
    }
    let a = model.wilson_a();
    let nu_b = model.cdh_nu();
    let ab = Complex64::new(0.5 * (nu_b + 1.0), 0.0);
    let out = |family, mu, z, argument, bound, pole_sign| Ok(PolynomialMap { route, family, mu, z, argument, bound, pole_sign });
    match (*model, route) {
        (PotentialModel::Coulomb { charge, ell, lambda, .. }, Route::Mp) => {
            let mu = ell as f64 + 1.0;
            let q = lambda * lambda / 4.0;
            if energy > 0.0 {
                let theta = ((2.0 * energy - q) / (2.0 * energy + q)).acos();
                let z = charge / (2.0 * energy).sqrt();
                out(FamilyParams::meixner_pollaczek(mu, theta)?, mu, z.into(), z, false, 1.0)
            } else if energy < 0.0 {
                if 2.0 * energy + q >= 0.0 {
                    return Err(Error::Regime(format!(
                        "the Meixner-Pollaczek Coulomb basis needs lambda^2 < 8|E| for a bound state (E = {energy}, lambda = {lambda}); lower lambda"
                    )));
                }
                let theta = theta_from_cosh((2.0 * energy - q) / (2.0 * energy + q))?;
                let z = imag(-charge / (-2.0 * energy).sqrt());
                let k = -(mu + charge / (-2.0 * energy).sqrt());
                out(FamilyParams::meixner(mu, (-2.0 * theta).exp())?, mu, z, k, true, 1.0)
            } else {
                Err(Error::Domain("the Coulomb map is singular at E = 0".into()))
            }
        }
        (PotentialModel::Coulomb { charge, ell, .. }, Route::Cdh) => {
            if !(energy < 0.0) {
                return Err(Error::Regime("the continuous dual Hahn Coulomb route has bound states only (E < 0)".into()));
            }
            // ε = 2E/λ² and ρ = Z/λ make μ = ½ + ρ/√(−ε) independent of λ
            let mu = 0.5 + charge / (-2.0 * energy).sqrt();
            let zi = ell as f64 + 0.5;
            out(FamilyParams::ContinuousDualHahn { mu, a: ab, b: ab }, mu, imag(zi), -zi * zi, true, -1.0)
        }
        (PotentialModel::Oscillator { omega, ell, lambda, .. }, Route::Mp) => {
            let mu = 0.5 * (ell as f64 + 1.5);
            let q = (lambda / 2.0).powi(4);
            let theta = theta_from_cosh((omega * omega + q) / (omega * omega - q))?;
            let z = imag(energy / (2.0 * omega));
            out(FamilyParams::meixner(mu, (-2.0 * theta).exp())?, mu, z, energy / (2.0 * omega) - mu, true, 1.0)
        }
        (PotentialModel::Oscillator { omega, ell, .. }, Route::Cdh) => {
            // ε = E/(2α²) with α² = ω reproduces the oscillator ladder
            let mu = 0.5 - energy / (2.0 * omega);
            let zi = 0.5 * (ell as f64 + 0.5);
            out(FamilyParams::ContinuousDualHahn { mu, a: ab, b: ab }, mu, imag(zi), -zi * zi, true, -1.0)
        }
        (PotentialModel::Morse { v0, v1, alpha, .. }, Route::Mp) => {
            if !(energy < 0.0) {
                return Err(Error::Regime("the Meixner-Pollaczek Morse route has bound states only (E < 0)".into()));
            }
            let (u0, u1, eps) = (2.0 * v0 / (alpha * alpha), 2.0 * v1 / (alpha * alpha), 2.0 * energy / (alpha * alpha));
            let mu = 0.5 + (-eps).sqrt();
            let zi = u1 / (2.0 * u0.sqrt());
            let n = morse_size(-zi - 0.5)?;
            let q = alpha * alpha / 4.0;
            let theta = theta_from_cosh((2.0 * v0 + q) / (2.0 * v0 - q))?;
            out(FamilyParams::krawtchouk(n, (-2.0 * theta).exp())?, mu, imag(zi), -mu - zi, true, -1.0)
        }
        (PotentialModel::Morse { v1, alpha, .. }, Route::Cdh) => {
            let mu = 2.0 * v1 / (alpha * alpha) + 0.5;
            let eps = 2.0 * energy / (alpha * alpha);
            let family = FamilyParams::ContinuousDualHahn { mu, a: ab, b: ab };
            if eps > 0.0 {
                out(family, mu, eps.sqrt().into(), eps, false, -1.0)
            } else {
                out(family, mu, imag((-eps).sqrt()), eps, true, -1.0)
            }
        }
        (PotentialModel::PoschlTeller { v0, v1, lambda, .. }, Route::Wilson) => {
            let (u0, u1) = (v0 / (lambda * lambda), v1 / (lambda * lambda));
            let (s0, s1) = ((0.25 - 2.0 * u0).sqrt(), (0.25 + 2.0 * u1).sqrt());
            let (mu, nu) = (0.5 * (1.0 + s1 - s0), 0.5 * (1.0 + s1 + s0));
            let z2 = energy / (2.0 * lambda * lambda);
            wilson_out(route, mu, nu, a, z2)
        }
        (PotentialModel::TrigScarf { v0, v_plus, v_minus, lambda, .. }, Route::Wilson) => {
            let l2 = lambda * lambda;
            let (u0, up, um, eps) = (2.0 * v0 / l2, 2.0 * v_plus / l2, 2.0 * v_minus / l2, 2.0 * energy / l2);
            if eps < u0 {
                return Err(Error::Regime(format!("Scarf levels lie above V0: need E >= V0 (E = {energy})")));
            }
            let sum = 1.0 + (up + um + 0.25).sqrt();
            let diff = 2.0 * (eps - u0).sqrt();
            let zi = 0.5 * (up - um + 0.25).sqrt();
            let (mu, nu) = (0.5 * (sum - diff), 0.5 * (sum + diff));
            let ac = Complex64::new(a, 0.0);
            out(FamilyParams::Wilson { mu, nu, a: ac, b: ac }, mu, imag(zi), -zi * zi, true, -1.0)
        }
        (PotentialModel::Eckart { v0, v1, lambda, .. }, Route::Wilson) => {
            let l2 = lambda * lambda;
            let (u0, u1, eps) = (2.0 * v0 / l2, 2.0 * v1 / l2, 2.0 * energy / l2);
            let half_sum = 0.5 * (1.0 + (4.0 * u1 + 1.0).sqrt());
            let inner = -eps - u0;
            if inner >= 0.0 {
                let (mu, nu) = (half_sum - inner.sqrt(), half_sum + inner.sqrt());
                wilson_out(route, mu, nu, a, eps)
            } else {
                // μ, ν form a conjugate pair; the Wilson family is symmetric in its
                // four parameters, so they take the (a, b) slots and a = b moves to (μ, ν)
                let w = (-inner).sqrt();
                let family = FamilyParams::Wilson { mu: a, nu: a, a: Complex64::new(half_sum, -w), b: Complex64::new(half_sum, w) };
                if eps > 0.0 {
                    out(family, a, eps.sqrt().into(), eps, false, -1.0)
                } else {
                    Err(Error::Regime(format!("Eckart energy {energy} has complex mu but is below threshold")))
                }
            }
        }
        (PotentialModel::RosenMorse { depth, barrier, lambda, .. }, Route::Wilson) => {
            let eps = 2.0 * energy / (lambda * lambda);
            wilson_out(route, -depth, barrier + 0.5, a, eps)
        }
        (PotentialModel::LogSpectrum { mu, lambda }, Route::Mp) => {
            if !(energy > 0.0) {
                return Err(Error::Domain(format!("the exponential spectrum lives at E > 0, got {energy}")));
            }
            let kappa = (2.0 * energy).sqrt();
            let theta = theta_from_cosh((kappa - mu * lambda) / (kappa + mu * lambda))?;
            let (n, _) = log_spectrum_size(mu);
            let zi = (kappa / lambda).ln();
            out(FamilyParams::krawtchouk(n, (-2.0 * theta).exp())?, mu, imag(zi), -mu - zi, true, -1.0)
        }
        _ => Err(Error::InvalidRoute { model: model.name(), route: route.name() }),
    }
}

fn wilson_out(route: Route, mu: f64, nu: f64, a: f64, z2: f64) -> Result<PolynomialMap> {
    let ac = Complex64::new(a, 0.0);
    let family = FamilyParams::Wilson { mu, nu, a: ac, b: ac };
    let (z, bound) = if z2 > 0.0 { (Complex64::new(z2.sqrt(), 0.0), false) } else { (imag((-z2).sqrt()), true) };
    Ok(PolynomialMap { route, family, mu, z, argument: z2, bound, pole_sign: -1.0 })
}

fn morse_size(top: f64) -> Result<usize> {
    if top < 0.0 {
        return Err(Error::NoBoundStates(format!("the floor rule gives N = floor({top}) < 0")));
    }
    Ok(top.floor() as usize)
}

/// Size `N` of the exponential spectrum (largest `N` with `e^{−(N+μ)} > −μ`) and
/// whether the next level sits exactly on the threshold.
pub fn log_spectrum_size(mu: f64) -> (usize, bool) {
    let m = -mu;
    let t = m - m.ln();
    let top = t.ceil() - 1.0;
    (top.max(0.0) as usize, t == t.ceil())
}

/// The `μ` at which the exponential spectrum gains its `(count)`-th level: the
/// root with `−μ > 1` of `−μ − ln(−μ) = count − 1`.
pub fn log_spectrum_threshold(count: usize) -> Result<f64> {
    if count < 3 {
        return Err(Error::ParameterRange("every mu < 0 other than -1 already has at least two levels".into()));
    }
    let target = count as f64 - 1.0;
    // m − ln m is increasing for m > 1; Newton from above converges monotonically
    let mut m = target + target.ln() + 1.0;
    for _ in 0..100 {
        let step = (m - m.ln() - target) / (1.0 - 1.0 / m);
        m -= step;
        if step.abs() <= 1e-16 * m {
            break;
        }
    }
    Ok(-m)
}

fn levels(values: impl Iterator<Item = f64>) -> Vec<Level> {
    values.enumerate().map(|(k, value)| Level { k, value }).collect()
}

fn finite_spectrum(n: usize, boundary: bool, source: &str, f: impl Fn(f64) -> f64) -> SpectrumResult {
    SpectrumResult { energies: levels((0..=n).map(|k| f(k as f64))), finite: true, n_max: Some(n), boundary, source: source.into() }
}

fn infinite_spectrum(kmax: usize, source: &str, f: impl Fn(f64) -> f64) -> SpectrumResult {
    SpectrumResult { energies: levels((0..=kmax).map(|k| f(k as f64))), finite: false, n_max: None, boundary: false, source: source.into() }
}

/// Closed-form bound-state energies; infinite ladders are listed up to `kmax`.
pub fn bound_spectrum(model: &PotentialModel, route: Route, kmax: usize) -> Result<SpectrumResult> {
    model.validate_for(route)?;
    match (*model, route) {
        (PotentialModel::Coulomb { charge, ell, .. }, _) => {
            if !(charge < 0.0) {
                return Err(Error::NoBoundStates(format!("Coulomb needs an attractive charge Z < 0, got {charge}")));
            }
            let l = ell as f64;
            let source = if route == Route::Mp { "E_k = -Z^2/(2(k+l+1)^2), Meixner-Pollaczek route" } else { "E_k = -Z^2/(2(k+l+1)^2), continuous dual Hahn route" };
            Ok(infinite_spectrum(kmax, source, |k| -0.5 * charge * charge / (k + l + 1.0).powi(2)))
        }
        (PotentialModel::Oscillator { omega, ell, .. }, _) => {
            let l = ell as f64;
            // ω = α² on the continuous dual Hahn route
            Ok(infinite_spectrum(kmax, "E_k = omega (2k + l + 3/2)", |k| omega * (2.0 * k + l + 1.5)))
        }
        (PotentialModel::Morse { v0, v1, alpha, .. }, Route::Mp) => {
            let c = v1 / (alpha * (2.0 * v0).sqrt());
            let n = morse_size(-c - 0.5)?;
            Ok(finite_spectrum(n, false, "E_k = -alpha^2/2 (k + 1/2 + V1/(alpha sqrt(2 V0)))^2", |k| -0.5 * alpha * alpha * (k + 0.5 + c).powi(2)))
        }
        (PotentialModel::Morse { v1, alpha, .. }, _) => {
            let rho = 2.0 * v1 / (alpha * alpha);
            if !(rho < -0.5) {
                return Err(Error::NoBoundStates(format!("needs V < -alpha^2/4, got 2V/alpha^2 = {rho}")));
            }
            let n = morse_size(-rho - 0.5)?;
            Ok(finite_spectrum(n, -rho - 0.5 == (-rho - 0.5).floor(), "E_k = -alpha^2/2 (k + 1/2 + 2V/alpha^2)^2", |k| -0.5 * alpha * alpha * (k + 0.5 + rho).powi(2)))
        }
        (PotentialModel::PoschlTeller { v0, v1, lambda, .. }, _) => {
            let l2 = lambda * lambda;
            let (s0, s1) = ((0.25 - 2.0 * v0 / l2).sqrt(), (0.25 + 2.0 * v1 / l2).sqrt());
            let top = 0.5 * s0 - 0.5 * s1 - 0.5;
            if !(s0 > 1.0 + s1) {
                return Err(Error::NoBoundStates(format!("mu >= 0: sqrt(1/4 - 2u0) = {s0} <= 1 + sqrt(1/4 + 2u1) = {}", 1.0 + s1)));
            }
            let n = morse_size(top)?;
            Ok(finite_spectrum(n, top == top.floor(), "E_k = -lambda^2/2 (2k + 1 + sqrt(1/4 + 2V1/lambda^2) - sqrt(1/4 - 2V0/lambda^2))^2", |k| {
                -0.5 * l2 * (2.0 * k + 1.0 + s1 - s0).powi(2)
            }))
        }
        (PotentialModel::TrigScarf { v0, v_plus, v_minus, lambda, .. }, _) => {
            let l2 = lambda * lambda;
            let (u0, up, um) = (2.0 * v0 / l2, 2.0 * v_plus / l2, 2.0 * v_minus / l2);
            let shift = 0.5 + 0.5 * (up + um + 0.25).sqrt() + 0.5 * (up - um + 0.25).sqrt();
            Ok(infinite_spectrum(kmax, "eps_k = u0 + (k + 1/2 + sqrt(u+ + u- + 1/4)/2 + sqrt(u+ - u- + 1/4)/2)^2, E = lambda^2 eps/2", |k| {
                0.5 * l2 * (u0 + (k + shift).powi(2))
            }))
        }
        (PotentialModel::Eckart { v0, v1, lambda, .. }, _) => {
            let l2 = lambda * lambda;
            let (u0, u1) = (2.0 * v0 / l2, 2.0 * v1 / l2);
            // the stated shift (μ+ν+1)/2 with μ + ν = 1 + √(4u₁+1)
            let shift = 0.5 * (2.0 + (4.0 * u1 + 1.0).sqrt());
            let count = (0..).take_while(|&k| (k as f64 + shift).powi(2) < -u0).count();
            if count == 0 {
                return Err(Error::NoBoundStates(format!("needs (1 + sqrt(4u1+1)/2)^2 < -u0, got u0 = {u0}")));
            }
            Ok(finite_spectrum(count - 1, false, "eps_k = -1/4 [k + (mu+nu+1)/2 - u0/(k + (mu+nu+1)/2)]^2 - u0, E = lambda^2 eps/2", |k| {
                let s = k + shift;
                0.5 * l2 * (-0.25 * (s - u0 / s).powi(2) - u0)
            }))
        }
        (PotentialModel::RosenMorse { depth, lambda, .. }, _) => {
            if !(depth > 0.0) {
                return Err(Error::NoBoundStates(format!("Rosen-Morse needs A > 0, got {depth}")));
            }
            let n = depth.floor() as usize;
            Ok(finite_spectrum(n, depth == depth.floor(), "eps_k = -(k - A)^2, E = lambda^2 eps/2", |k| -0.5 * lambda * lambda * (k - depth).powi(2)))
        }
        (PotentialModel::LogSpectrum { mu, lambda }, _) => {
            let (n, boundary) = log_spectrum_size(mu);
            Ok(finite_spectrum(n, boundary, "E_k = lambda^2/2 exp(-2(k+mu)), N: largest with exp(-(N+mu)) > -mu", |k| {
                0.5 * lambda * lambda * (-2.0 * (k + mu)).exp()
            }))
        }
        (PotentialModel::Table1 { .. }, _) => Err(Error::UnsupportedFamily("table1 spectra (they need the H_n orthogonality measure)")),
    }
}

fn scattering(phase: f64) -> ScatteringResult {
    ScatteringResult { amplitude: f64::NAN, phase: wrap_phase(phase), method: ScatteringMethod::ClosedForm, residual: 0.0 }
}

fn ag(re: f64, im: f64) -> Result<f64> {
    arg_gamma(Complex64::new(re, im))
}

/// Scattering phase shift at `energy > 0` from the closed Γ-argument formulas.
///
/// Only the phase is filled in; the amplitude is `NaN`. The Wilson-route formulas
/// carry the basis parameter `a` from the model (default ½).
pub fn phase_shift(model: &PotentialModel, energy: f64) -> Result<ScatteringResult> {
    model.validate()?;
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::Domain(format!("phase shifts need E > 0, got {energy}")));
    }
    let a = model.wilson_a();
    let kappa = (2.0 * energy).sqrt();
    match *model {
        PotentialModel::Coulomb { charge, ell, .. } => Ok(scattering(ag(ell as f64 + 1.0, charge / kappa)?)),
        PotentialModel::Morse { v1, alpha, .. } => {
            let k = kappa / alpha;
            let nu = model.cdh_nu();
            Ok(scattering(ag(0.0, 2.0 * k)? - ag(2.0 * v1 / (alpha * alpha) + 0.5, k)? - 2.0 * ag(0.5 * (nu + 1.0), k)?))
        }
        PotentialModel::PoschlTeller { v0, v1, lambda, .. } => {
            let l2 = lambda * lambda;
            let (s0, s1) = ((0.25 - 2.0 * v0 / l2).sqrt(), (0.25 + 2.0 * v1 / l2).sqrt());
            let k = kappa / (2.0 * lambda);
            Ok(scattering(
                ag(0.0, kappa / lambda)? - ag(0.5 + 0.5 * s1 - 0.5 * s0, k)? - ag(0.5 + 0.5 * s1 + 0.5 * s0, k)? - 2.0 * ag(a, k)?,
            ))
        }
        PotentialModel::Eckart { v0, v1, lambda, .. } => {
            let l2 = lambda * lambda;
            let (u0, u1, eps) = (2.0 * v0 / l2, 2.0 * v1 / l2, 2.0 * energy / l2);
            let base = 0.5 + (u1 + 0.25).sqrt();
            let se = eps.sqrt();
            // √(ε+u₀) turns imaginary below −u₀; i·√(ε+u₀) is then real
            let (shift_re, shift_im) = if eps + u0 >= 0.0 { (0.0, (eps + u0).sqrt()) } else { ((-eps - u0).sqrt(), 0.0) };
            Ok(scattering(
                ag(0.0, 2.0 * se)? - ag(base + shift_re, se - shift_im)? - ag(base - shift_re, se + shift_im)? - 2.0 * ag(a, se)?,
            ))
        }
        PotentialModel::RosenMorse { depth, barrier, lambda, .. } => {
            let se = (2.0 * energy).sqrt() / lambda;
            Ok(scattering(ag(0.0, 2.0 * se)? - ag(-depth, se)? - ag(barrier + 0.5, se)? - 2.0 * ag(a, se)?))
        }
        _ => Err(Error::Regime(format!("the {} model has no scattering states", model.name()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{closed_form_scattering, phase_distance};

    fn coulomb(z: f64, ell: u32) -> PotentialModel {
        PotentialModel::Coulomb { charge: z, ell, lambda: 1.0, nu: None }
    }

    #[test]
    fn closed_spectra() {
        let e = bound_spectrum(&coulomb(-1.0, 0), Route::Mp, 2).unwrap().values();
        assert_eq!(e, vec![-0.5, -0.125, -0.5 / 9.0]);
        let osc = PotentialModel::Oscillator { omega: 1.0, ell: 1, lambda: 1.0, nu: None };
        assert_eq!(bound_spectrum(&osc, Route::Mp, 2).unwrap().values()[2], 6.5);
        let rm = PotentialModel::RosenMorse { depth: 2.5, barrier: 1.0, lambda: std::f64::consts::SQRT_2, a: None };
        let e = bound_spectrum(&rm, Route::Wilson, 0).unwrap().values();
        for (x, y) in e.iter().zip([-6.25, -2.25, -0.25]) {
            assert!((x - y).abs() < 1e-12);
        }
        let morse = PotentialModel::Morse { v0: 0.125, v1: -1.0, alpha: 1.0, nu: None };
        assert!((bound_spectrum(&morse, Route::Mp, 0).unwrap().values()[0] + 1.125).abs() < 1e-15);
    }

    #[test]
    fn routes_agree() {
        for (z, ell) in [(-1.0, 0), (-2.3, 2)] {
            let a = bound_spectrum(&coulomb(z, ell), Route::Mp, 6).unwrap().values();
            let b = bound_spectrum(&coulomb(z, ell), Route::Cdh, 6).unwrap().values();
            assert_eq!(a, b);
        }
        for (v1, alpha) in [(-1.0, 1.0), (-3.7, 1.4)] {
            let m = PotentialModel::Morse { v0: alpha * alpha / 8.0, v1, alpha, nu: None };
            let a = bound_spectrum(&m, Route::Mp, 0).unwrap().values();
            let b = bound_spectrum(&m, Route::Cdh, 0).unwrap().values();
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-12 * x.abs());
            }
        }
    }

    #[test]
    fn pole_residuals_vanish() {
        let models = [
            (PotentialModel::Coulomb { charge: -1.3, ell: 1, lambda: 0.4, nu: None }, Route::Mp),
            (coulomb(-1.3, 1), Route::Cdh),
            (PotentialModel::Oscillator { omega: 0.8, ell: 2, lambda: 1.0, nu: None }, Route::Mp),
            (PotentialModel::Oscillator { omega: 0.8, ell: 2, lambda: 1.0, nu: Some(0.3) }, Route::Cdh),
            (PotentialModel::Morse { v0: 0.4, v1: -2.0, alpha: 0.9, nu: None }, Route::Mp),
            (PotentialModel::Morse { v0: 0.125, v1: -2.0, alpha: 1.0, nu: None }, Route::Cdh),
            (PotentialModel::PoschlTeller { v0: -12.0, v1: 0.3, lambda: 1.0, a: None }, Route::Wilson),
            (PotentialModel::TrigScarf { v0: 0.2, v_plus: 3.0, v_minus: 1.0, lambda: 1.0, a: None }, Route::Wilson),
            (PotentialModel::RosenMorse { depth: 2.5, barrier: 4.0, lambda: 1.0, a: None }, Route::Wilson),
            (PotentialModel::LogSpectrum { mu: -3.0, lambda: 1.0 }, Route::Mp),
        ];
        for (m, r) in models {
            let spec = bound_spectrum(&m, r, 4).unwrap();
            for l in &spec.energies {
                let map = map_to_polynomial(&m, r, l.value).unwrap();
                assert!(map.bound);
                assert!(map.pole_residual(l.k) < 1e-12, "{m:?} {r:?} k={} residual {}", l.k, map.pole_residual(l.k));
            }
        }
    }

    #[test]
    fn coulomb_map_and_phase() {
        let m = coulomb(-1.0, 0);
        let map = map_to_polynomial(&m, Route::Mp, 0.5).unwrap();
        assert_eq!(map.mu, 1.0);
        assert!((map.z.re + 1.0).abs() < 1e-15);
        // arg Γ(1 + iZ/√(2E)) with Z = −1 is arg Γ(1 − i)
        let d = phase_shift(&m, 0.5).unwrap().phase;
        assert!((d - 0.3016403).abs() < 1e-7);
        let d = phase_shift(&coulomb(1.0, 0), 0.5).unwrap().phase;
        assert!((d + 0.3016403).abs() < 1e-7);
        assert!(phase_shift(&coulomb(0.0, 2), 1.3).unwrap().phase.abs() < 1e-15);
    }

    #[test]
    fn phases_match_asymptotic_formula() {
        let models = [
            coulomb(-1.2, 1),
            coulomb(0.7, 0),
            PotentialModel::Morse { v0: 0.125, v1: 0.4, alpha: 1.0, nu: Some(0.6) },
            PotentialModel::PoschlTeller { v0: -0.5, v1: 0.3, lambda: 1.2, a: Some(0.7) },
            PotentialModel::Eckart { v0: -0.3, v1: 0.8, lambda: 1.1, a: None },
            PotentialModel::Eckart { v0: -2.0, v1: 0.8, lambda: 1.1, a: None },
            PotentialModel::RosenMorse { depth: -0.7, barrier: 1.5, lambda: 0.9, a: Some(1.1) },
        ];
        for m in models {
            let route = if let PotentialModel::Morse { .. } = m { Route::Cdh } else { m.default_route().unwrap() };
            for e in [0.2, 0.9, 2.5] {
                let map = map_to_polynomial(&m, route, e).unwrap();
                let closed = closed_form_scattering(&map.family, map.z.re).unwrap();
                let direct = phase_shift(&m, e).unwrap();
                assert!(phase_distance(closed.phase, direct.phase) < 1e-12, "{m:?} E={e}: {} vs {}", closed.phase, direct.phase);
            }
        }
    }

    #[test]
    fn log_spectrum_boundary() {
        let s = bound_spectrum(&PotentialModel::LogSpectrum { mu: -3.0, lambda: 1.0 }, Route::Mp, 0).unwrap();
        assert_eq!(s.energies.len(), 2);
        assert!((s.values()[0] - 0.5 * 6f64.exp()).abs() < 1e-12 * 0.5 * 6f64.exp());
        let t = log_spectrum_threshold(3).unwrap();
        assert!((-t - (-t).ln() - 2.0).abs() < 1e-14);
        assert_eq!(log_spectrum_size(t * (1.0 + 1e-12)).0, 2);
        assert_eq!(log_spectrum_size(t * (1.0 - 1e-12)).0, 1);
    }

    #[test]
    fn constraints_and_routes() {
        let bad = PotentialModel::Morse { v0: 0.1, v1: -1.0, alpha: 1.0, nu: None };
        assert!(matches!(bound_spectrum(&bad, Route::Mp, 0), Err(Error::Constraint(_))));
        let pt = PotentialModel::PoschlTeller { v0: -2.0, v1: 0.0, lambda: 1.0, a: None };
        assert!(matches!(map_to_polynomial(&pt, Route::Mp, -1.0), Err(Error::InvalidRoute { .. })));
        assert!(matches!(bound_spectrum(&coulomb(1.0, 0), Route::Mp, 3), Err(Error::NoBoundStates(_))));
        assert!(matches!(phase_shift(&coulomb(-1.0, 0), -0.1), Err(Error::Domain(_))));
    }
}
