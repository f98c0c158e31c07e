//! Bases attached to each model, matrix audits, Rayleigh–Ritz spectra and
//! wavefunction reconstruction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::basis::{assemble, generalized_eigen, BasisShape, BasisSpec, Coordinate, MatrixPair, YPoint};
use super::{bound_spectrum, map_to_polynomial, PotentialModel, Route};
use crate::error::{Error, Result};
use crate::polyfam::{discrete_weight, poly_eval_recursion, poly_sequence, weight_density, FamilyParams};
use crate::spectra::{Level, SpectrumResult};

type Potential = Box<dyn Fn(&YPoint) -> f64 + Send + Sync>;

/// A basis, the potential written in its coordinate, and the energy at which
/// `H − E S` is audited.
pub struct Setup {
    pub basis: BasisSpec,
    pub energy: f64,
    potential: Potential,
}

impl Setup {
    pub fn potential(&self, p: &YPoint) -> f64 {
        (self.potential)(p)
    }
}

/// Quadrature tolerance for matrix assembly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixOptions {
    pub tol: f64,
}

impl Default for MatrixOptions {
    fn default() -> Self {
        Self { tol: 1e-12 }
    }
}

// Positive root of x(x − s) = c.
fn root(c: f64, s: f64) -> Result<f64> {
    let disc = s * s + 4.0 * c;
    if disc < 0.0 {
        return Err(Error::Constraint(format!("no real basis exponent: x(x - {s}) = {c} has no real root")));
    }
    Ok(0.5 * (s + disc.sqrt()))
}

fn ground_energy(model: &PotentialModel, route: Route) -> Result<f64> {
    Ok(bound_spectrum(model, route, 0)?.energies[0].value)
}

/// The basis for `model` along `route`. Energy-dependent bases are built at
/// `energy`, defaulting to the ground level.
pub fn setup(model: &PotentialModel, route: Option<Route>, energy: Option<f64>) -> Result<Setup> {
    if let PotentialModel::Table1 { .. } = model {
        model.validate()?;
        return table1_setup(model);
    }
    let route = route.or_else(|| model.default_route()).ok_or(Error::InvalidRoute { model: model.name(), route: "none" })?;
    model.validate_for(route)?;
    let a = model.wilson_a();
    let nu_b = model.cdh_nu();
    let sample = |fallback: f64| energy.unwrap_or(fallback);
    let s = match (*model, route) {
        (PotentialModel::Coulomb { charge, ell, lambda, .. }, Route::Mp) => {
            let l = ell as f64;
            Setup {
                basis: BasisSpec::laguerre(Coordinate::Linear { scale: lambda }, l + 1.0, 2.0 * l + 1.0),
                energy: sample(-0.3 * lambda * lambda),
                potential: centrifugal_linear(l, lambda, charge),
            }
        }
        (PotentialModel::Coulomb { charge, ell, .. }, Route::Cdh) => {
            let e = match energy {
                Some(e) => e,
                None => ground_energy(model, route)?,
            };
            if !(e < 0.0) {
                return Err(Error::Regime("the continuous dual Hahn Coulomb basis needs E < 0 (lambda^2 = -8E)".into()));
            }
            let lam = (-8.0 * e).sqrt();
            Setup {
                basis: BasisSpec::laguerre(Coordinate::Linear { scale: lam }, 1.0 + 0.5 * nu_b, nu_b),
                energy: e,
                potential: centrifugal_linear(ell as f64, lam, charge),
            }
        }
        (PotentialModel::Oscillator { omega, ell, lambda, .. }, Route::Mp) => {
            let l = ell as f64;
            Setup {
                basis: BasisSpec::laguerre(Coordinate::Quadratic { scale: lambda }, 0.5 * (l + 1.0), l + 0.5),
                energy: sample(0.7 * omega),
                potential: centrifugal_quadratic(l, lambda, omega),
            }
        }
        (PotentialModel::Oscillator { omega, ell, .. }, Route::Cdh) => {
            let l = ell as f64;
            let alpha = omega.sqrt();
            Setup {
                basis: BasisSpec::laguerre(Coordinate::Quadratic { scale: alpha }, 0.5 * (nu_b + 1.5), nu_b),
                energy: sample(0.7 * omega),
                potential: centrifugal_quadratic(l, alpha, omega),
            }
        }
        (PotentialModel::Morse { v0, v1, alpha, .. }, Route::Mp) => {
            let e = match energy {
                Some(e) => e,
                None => ground_energy(model, route)?,
            };
            if !(e < 0.0) {
                return Err(Error::Regime("the Meixner-Pollaczek Morse basis needs E < 0 (nu = (2/alpha) sqrt(-2E))".into()));
            }
            let nu = 2.0 / alpha * (-2.0 * e).sqrt();
            Setup {
                basis: BasisSpec::laguerre(Coordinate::Exponential { scale: alpha }, 0.5 * nu, nu),
                energy: e,
                potential: Box::new(move |p| (v0 * p.y + v1) * p.y),
            }
        }
        (PotentialModel::Morse { v0, v1, alpha, .. }, Route::Cdh) => Setup {
            basis: BasisSpec::laguerre(Coordinate::Exponential { scale: alpha }, 0.5 * (nu_b + 1.0), nu_b),
            energy: sample(0.3 * alpha * alpha),
            potential: Box::new(move |p| (v0 * p.y + v1) * p.y),
        },
        (PotentialModel::PoschlTeller { v0, v1, lambda, .. }, _) => {
            let sum = 1.0 + (0.25 + 2.0 * v1 / (lambda * lambda)).sqrt();
            Setup {
                basis: BasisSpec::jacobi(Coordinate::TanhSquared { scale: lambda }, a, 0.5 * (sum - 0.5), 2.0 * a - 1.0, sum - 1.0),
                energy: sample(0.4 * lambda * lambda),
                potential: Box::new(move |p| 0.5 * v0 * p.one_minus + v1 * p.one_minus / p.one_plus),
            }
        }
        (PotentialModel::TrigScarf { v0, v_plus, v_minus, lambda, .. }, _) => {
            let sum = 1.0 + (2.0 * (v_plus + v_minus) / (lambda * lambda) + 0.25).sqrt();
            Setup {
                basis: BasisSpec::jacobi(Coordinate::Sine { scale: lambda }, a + 0.25, 0.5 * (sum - 0.5), 2.0 * a - 1.0, sum - 1.0),
                energy: sample(v0 + lambda * lambda),
                potential: Box::new(move |p| v0 + (v_plus - v_minus * p.y) / (p.one_minus * p.one_plus)),
            }
        }
        (PotentialModel::Eckart { v0, v1, lambda, .. }, _) => {
            let sum = 1.0 + (8.0 * v1 / (lambda * lambda) + 1.0).sqrt();
            Setup {
                basis: BasisSpec::jacobi(Coordinate::ExpInterval { scale: lambda }, a, 0.5 * sum, 2.0 * a - 1.0, sum - 1.0),
                energy: sample(0.4 * lambda * lambda),
                potential: Box::new(move |p| p.one_minus / p.one_plus * (v0 + 2.0 * v1 / p.one_plus)),
            }
        }
        (PotentialModel::RosenMorse { depth, barrier, lambda, .. }, _) => {
            let l2 = lambda * lambda;
            let vp = 0.5 * l2 * (barrier * barrier + depth * depth + depth);
            let vm = 0.5 * l2 * barrier * (2.0 * depth + 1.0);
            cosh_setup(lambda, 0.0, 0.0, vp, vm, energy.unwrap_or(0.3 * l2))?
        }
        _ => return Err(Error::InvalidRoute { model: model.name(), route: route.name() }),
    };
    Ok(s)
}

fn centrifugal_linear(l: f64, lambda: f64, charge: f64) -> Potential {
    Box::new(move |p| {
        let r = p.y / lambda;
        0.5 * l * (l + 1.0) / (r * r) + charge / r
    })
}

fn centrifugal_quadratic(l: f64, lambda: f64, omega: f64) -> Potential {
    Box::new(move |p| {
        let r2 = p.y / (lambda * lambda);
        0.5 * l * (l + 1.0) / r2 + 0.5 * omega * omega * r2
    })
}

// y = cosh λx with V = V₀ + (V₊ − V₋y)/(y² − 1) + V₁y; the prefactor decays
// algebraically, so only finitely many basis functions are square integrable.
fn cosh_setup(lambda: f64, v0: f64, v1: f64, vp: f64, vm: f64, energy: f64) -> Result<Setup> {
    let l2 = lambda * lambda;
    let alpha = root((vp - vm) / (2.0 * l2), 0.5)?;
    let d = 1.0 / 16.0 + (vp + vm) / (2.0 * l2);
    if d < 0.0 {
        return Err(Error::Constraint("cosh basis needs (V+ + V-)/(2 lambda^2) >= -1/16".into()));
    }
    let beta = 0.25 - d.sqrt();
    Ok(Setup {
        basis: BasisSpec::jacobi(Coordinate::Cosh { scale: lambda }, alpha, beta, 2.0 * alpha - 0.5, 2.0 * beta - 0.5),
        energy,
        potential: Box::new(move |p| v0 + (vp - vm * p.y) / (p.one_minus * p.one_plus) + v1 * p.y),
    })
}

/// Largest square-integrable basis size for the `cosh` bases, `None` otherwise.
pub fn basis_size_limit(setup: &Setup, linear_term: bool) -> Option<usize> {
    match (setup.basis.coordinate, setup.basis.shape) {
        (Coordinate::Cosh { .. }, BasisShape::Jacobi { alpha, beta, .. }) => {
            // need α + β + M − 1 below 0 (or −½ with a growing V₁y term)
            let bound = if linear_term { -0.5 } else { 0.0 } + 1.0 - alpha - beta;
            let m = bound.ceil() - 1.0;
            Some(if m < 0.0 { 0 } else { m as usize })
        }
        _ => None,
    }
}

fn table1_setup(model: &PotentialModel) -> Result<Setup> {
    let PotentialModel::Table1 { row, v0, v1, v_plus: vp, v_minus: vm, scale } = *model else {
        return Err(Error::UnsupportedFamily("non-table1 model"));
    };
    let any_energy = 0.7;
    let s = match row {
        1 => {
            let c = PI / scale;
            let (al, be) = (root((vp - vm) / (2.0 * c * c), 0.5)?, root((vp + vm) / (2.0 * c * c), 0.5)?);
            Setup {
                basis: BasisSpec::jacobi(Coordinate::Sine { scale: c }, al, be, 2.0 * al - 0.5, 2.0 * be - 0.5),
                energy: any_energy,
                potential: Box::new(move |p| v0 + (vp - vm * p.y) / (p.one_minus * p.one_plus) + v1 * p.y),
            }
        }
        2 => {
            let (al, be) = (root(scale * scale * vm / 2.0, 1.0)?, root(scale * scale * vp / 2.0, 0.5)?);
            Setup {
                basis: BasisSpec::jacobi(Coordinate::QuadraticInterval { length: scale }, al, be, 2.0 * al - 1.0, 2.0 * be - 0.5),
                energy: any_energy,
                potential: Box::new(move |p| 2.0 / p.one_minus * (v0 + 2.0 * vp / p.one_plus + 2.0 * vm / p.one_minus + v1 * p.y)),
            }
        }
        3 => {
            // the lower exponent is tied to the energy: α = √(2(V₋ − E))/λ
            let e = vm - scale * scale;
            let al = (2.0 * (vm - e)).sqrt() / scale;
            let be = root(2.0 * vp / (scale * scale), 1.0)?;
            Setup {
                basis: BasisSpec::jacobi(Coordinate::ExpInterval { scale }, al, be, 2.0 * al, 2.0 * be - 1.0),
                energy: e,
                potential: Box::new(move |p| {
                    p.one_minus / p.one_plus * (v0 + 2.0 * vm / p.one_minus + 2.0 * vp / p.one_plus + v1 * p.y)
                }),
            }
        }
        4 => {
            let e = vm - scale * scale;
            let al = ((vm - e) / 2.0).sqrt() / scale;
            let be = root(vp / (2.0 * scale * scale), 0.5)?;
            Setup {
                basis: BasisSpec::jacobi(Coordinate::TanhSquared { scale }, al, be, 2.0 * al, 2.0 * be - 0.5),
                energy: e,
                potential: Box::new(move |p| vm + vp * p.one_minus / p.one_plus + 0.5 * (v0 + v1 * p.y) * p.one_minus),
            }
        }
        5 => {
            let e = vp - vm.abs() - scale * scale;
            let al = ((vp - vm - e) / 2.0).sqrt() / scale;
            let be = ((vp + vm - e) / 2.0).sqrt() / scale;
            Setup {
                basis: BasisSpec::jacobi(Coordinate::Tanh { scale }, al, be, 2.0 * al, 2.0 * be),
                energy: e,
                potential: Box::new(move |p| vp - vm * p.y + (v0 + v1 * p.y) * p.one_minus * p.one_plus),
            }
        }
        6 => {
            let c = 2.0 * PI / scale;
            let (al, be) = (root(2.0 * vm / (c * c), 0.5)?, root(2.0 * vp / (c * c), 0.5)?);
            Setup {
                basis: BasisSpec::jacobi(Coordinate::SineSquared { length: scale }, al, be, 2.0 * al - 0.5, 2.0 * be - 0.5),
                energy: any_energy,
                potential: Box::new(move |p| v0 + 2.0 * vp / p.one_plus + 2.0 * vm / p.one_minus + v1 * p.y),
            }
        }
        _ => cosh_setup(scale, v0, v1, vp, vm, any_energy)?,
    };
    Ok(s)
}

/// The basis of an `H_n`-class (table1) model.
pub fn table1_basis(model: &PotentialModel) -> Result<BasisSpec> {
    Ok(table1_setup(model)?.basis)
}

/// Representative parameters for each table1 row.
pub fn table1_samples() -> Vec<PotentialModel> {
    let row = |row, v0, v1, v_plus, v_minus, scale| PotentialModel::Table1 { row, v0, v1, v_plus, v_minus, scale };
    vec![
        row(1, 0.3, 0.4, 2.0, 0.5, 2.0),
        row(2, 0.3, 0.4, 1.5, 0.8, 1.7),
        row(3, 0.3, 0.4, 1.2, 0.6, 1.1),
        row(4, 0.3, 0.4, 1.5, -0.2, 0.9),
        row(5, 0.3, 0.4, 1.0, 0.3, 1.2),
        row(6, 0.3, 0.4, 1.0, 2.0, 2.5),
        row(7, 0.3, 0.4, 601.0, 599.0, 1.0),
    ]
}

/// One representative parameter set per basis along each of its routes.
pub fn representative_models() -> Vec<(PotentialModel, Route)> {
    vec![
        (PotentialModel::Coulomb { charge: -1.0, ell: 0, lambda: 1.0, nu: None }, Route::Mp),
        (PotentialModel::Coulomb { charge: -1.0, ell: 1, lambda: 1.0, nu: None }, Route::Cdh),
        (PotentialModel::Oscillator { omega: 1.0, ell: 1, lambda: 1.0, nu: None }, Route::Mp),
        (PotentialModel::Oscillator { omega: 1.0, ell: 0, lambda: 1.0, nu: None }, Route::Cdh),
        (PotentialModel::Morse { v0: 0.5, v1: -4.0, alpha: 1.0, nu: None }, Route::Mp),
        (PotentialModel::Morse { v0: 0.125, v1: -1.0, alpha: 1.0, nu: None }, Route::Cdh),
        (PotentialModel::PoschlTeller { v0: -12.0, v1: 0.3, lambda: 1.0, a: None }, Route::Wilson),
        (PotentialModel::TrigScarf { v0: 0.2, v_plus: 3.0, v_minus: 1.0, lambda: 1.0, a: None }, Route::Wilson),
        (PotentialModel::Eckart { v0: -20.0, v1: 0.5, lambda: 1.0, a: None }, Route::Wilson),
        (PotentialModel::RosenMorse { depth: 2.5, barrier: 4.0, lambda: 1.0, a: None }, Route::Wilson),
    ]
}

/// How many basis functions are square integrable, when that number is finite.
pub fn max_basis_size(model: &PotentialModel, route: Option<Route>) -> Result<Option<usize>> {
    Ok(basis_size_limit(&setup(model, route, None)?, linear_term(model)))
}

/// The basis for `model` along `route` (table1 rows ignore the route).
pub fn basis_for(model: &PotentialModel, route: Option<Route>, energy: Option<f64>) -> Result<BasisSpec> {
    Ok(setup(model, route, energy)?.basis)
}

/// `φ_n(x)` for the model's basis.
pub fn basis_eval(model: &PotentialModel, route: Option<Route>, n: usize, x: f64) -> Result<f64> {
    basis_for(model, route, None)?.eval(n, x)
}

fn linear_term(model: &PotentialModel) -> bool {
    matches!(model, PotentialModel::Table1 { v1, .. } if *v1 != 0.0)
}

fn assemble_setup(setup: &Setup, m: usize, opts: MatrixOptions, linear: bool) -> Result<MatrixPair> {
    if let Some(limit) = basis_size_limit(setup, linear) {
        if m > limit {
            return Err(Error::ParameterRange(format!("only {limit} basis functions are square integrable here, asked for {m}")));
        }
    }
    assemble(&setup.basis, m, |p| setup.potential(p), opts.tol)
}

/// `H` and `S` in the model's basis, assembled by quadrature in `y`.
pub fn hamiltonian_matrix(model: &PotentialModel, route: Option<Route>, m: usize, energy: Option<f64>, opts: MatrixOptions) -> Result<MatrixPair> {
    let s = setup(model, route, energy)?;
    assemble_setup(&s, m, opts, linear_term(model))
}

/// Tridiagonality audit of one basis plus its perturbed-exponent control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagAudit {
    pub basis: BasisSpec,
    pub energy: f64,
    pub size: usize,
    pub defect: f64,
    /// Defect of the same basis with its leading exponent shifted.
    pub control_defect: Option<f64>,
}

/// Off-band defect of `H − E S` in the model's basis at its audit energy.
pub fn tridiagonality_defect(model: &PotentialModel, route: Option<Route>, m: usize, opts: MatrixOptions) -> Result<f64> {
    Ok(tridiagonality_audit(model, route, m, None, opts)?.defect)
}

/// Full audit; `control_shift` perturbs the leading exponent for a negative control.
pub fn tridiagonality_audit(model: &PotentialModel, route: Option<Route>, m: usize, control_shift: Option<f64>, opts: MatrixOptions) -> Result<TridiagAudit> {
    let s = setup(model, route, None)?;
    let linear = linear_term(model);
    let pair = assemble_setup(&s, m, opts, linear)?;
    let defect = pair.tridiagonality_defect(s.energy);
    let control_defect = match control_shift {
        Some(shift) => {
            let perturbed = Setup { basis: s.basis.perturbed(shift), energy: s.energy, potential: Box::new(|_| 0.0) };
            let pair = assemble(&perturbed.basis, m, |p| s.potential(p), opts.tol)?;
            Some(pair.tridiagonality_defect(s.energy))
        }
        None => None,
    };
    Ok(TridiagAudit { basis: s.basis, energy: s.energy, size: m, defect, control_defect })
}

/// Rayleigh–Ritz spectrum next to the closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenOracleResult {
    pub spectrum: SpectrumResult,
    pub closed_form: SpectrumResult,
    /// Basis size actually used.
    pub size: usize,
    /// Largest level change between sizes `M/2` and `M`.
    pub half_size_change: f64,
}

fn energy_dependent(model: &PotentialModel, route: Route) -> bool {
    matches!((model, route), (PotentialModel::Morse { .. }, Route::Mp) | (PotentialModel::Coulomb { .. }, Route::Cdh))
}

/// Lowest eigenvalues of `H c = E S c` for the levels the closed form lists
/// (all of a finite spectrum, `0..=kmax` of an infinite one).
pub fn eigen_oracle_spectrum(model: &PotentialModel, route: Route, m: usize, kmax: usize, opts: MatrixOptions) -> Result<EigenOracleResult> {
    let closed = bound_spectrum(model, route, kmax)?;
    let count = closed.energies.len();
    let linear = linear_term(model);
    let solve = |size: usize, energy: Option<f64>| -> Result<Vec<f64>> {
        let s = setup(model, Some(route), energy)?;
        let pair = assemble_setup(&s, size, opts, linear)?;
        Ok(generalized_eigen(&pair)?.0)
    };
    let mut size = m;
    if let Some(limit) = basis_size_limit(&setup(model, Some(route), None)?, linear) {
        size = size.min(limit);
    }
    if size == 0 {
        return Err(Error::ParameterRange("basis size must be positive".into()));
    }
    let run = |size: usize| -> Result<Vec<f64>> {
        if energy_dependent(model, route) {
            closed.energies.iter().map(|l| Ok(solve(size, Some(l.value))?.get(l.k).copied().unwrap_or(f64::NAN))).collect()
        } else {
            let mut v = solve(size, None)?;
            v.resize(count.max(v.len()), f64::NAN);
            v.truncate(count);
            Ok(v)
        }
    };
    let full = run(size)?;
    let half = if size >= 2 { run(size / 2)? } else { full.clone() };
    let half_size_change = full.iter().zip(&half).filter(|(a, b)| a.is_finite() && b.is_finite()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let spectrum = SpectrumResult {
        energies: full.iter().enumerate().map(|(k, &value)| Level { k, value }).collect(),
        finite: closed.finite,
        n_max: closed.n_max,
        boundary: closed.boundary,
        source: format!("Rayleigh-Ritz, M = {size}"),
    };
    Ok(EigenOracleResult { spectrum, closed_form: closed, size, half_size_change })
}

/// Bound-state index or scattering energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum EnergyLabel {
    Bound(usize),
    Continuum(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionSample {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub truncation: usize,
    pub energy: f64,
    pub label: EnergyLabel,
    /// `ℓ²` norm of the last tenth of the expansion coefficients.
    pub tail_estimate: f64,
    /// `√(cᵀ S c)` for bound states (the expansion fixes ψ only up to a constant);
    /// skipped above [`NORM_TRUNCATION_CAP`] terms.
    pub norm: Option<f64>,
}

/// Largest truncation for which the bound-state norm is computed.
pub const NORM_TRUNCATION_CAP: usize = 400;

/// Largest accepted truncation.
pub const MAX_TRUNCATION: usize = 5000;

/// `ψ(x) = √ω Σ_{n<T} Q_n φ_n(x)` (bound) or `√ρ Σ P_n φ_n(x)` (continuum) on the
/// Meixner–Pollaczek route, whose bound states use the Meixner or Krawtchouk
/// polynomials.
pub fn reconstruct_wavefunction(model: &PotentialModel, route: Route, label: EnergyLabel, xs: &[f64], truncation: usize) -> Result<WavefunctionSample> {
    if truncation == 0 || truncation > MAX_TRUNCATION {
        return Err(Error::ParameterRange(format!("truncation must be in 1..={MAX_TRUNCATION}, got {truncation}")));
    }
    if route != Route::Mp || !matches!(model, PotentialModel::Coulomb { .. } | PotentialModel::Oscillator { .. } | PotentialModel::Morse { .. }) {
        return Err(Error::UnsupportedFamily("wavefunction reconstruction (Coulomb, oscillator and Morse on the Meixner-Pollaczek route)"));
    }
    let energy = match label {
        EnergyLabel::Bound(k) => {
            let spec = bound_spectrum(model, route, k)?;
            spec.energies.get(k).map(|l| l.value).ok_or_else(|| Error::DegreeOutOfRange { degree: k, size: spec.n_max.unwrap_or(0) })?
        }
        EnergyLabel::Continuum(e) => e,
    };
    let map = map_to_polynomial(model, route, energy)?;
    match (label, map.bound) {
        (EnergyLabel::Bound(_), false) | (EnergyLabel::Continuum(_), true) => {
            return Err(Error::Regime(format!("energy {energy} does not match the requested {label:?} regime")));
        }
        _ => {}
    }
    let coefficients = match label {
        EnergyLabel::Bound(k) => {
            if let Some(size) = map.family.finite_size() {
                if truncation > size + 1 {
                    return Err(Error::DegreeOutOfRange { degree: truncation - 1, size });
                }
            }
            if !matches!(map.family, FamilyParams::Meixner { .. } | FamilyParams::Krawtchouk { .. }) {
                return Err(Error::Regime("bound state without a discrete family".into()));
            }
            // self-duality √ω_k Q_n(k) = √ω_n Q_k(n): the degree-k recursion in n is
            // stable, while the forward recursion in n at fixed k loses the decaying solution
            (0..truncation)
                .map(|n| Ok(discrete_weight(&map.family, n)?.sqrt() * poly_eval_recursion(&map.family, k, n as f64)?))
                .collect::<Result<Vec<_>>>()?
        }
        EnergyLabel::Continuum(_) => {
            let rho = weight_density(&map.family, map.argument)?;
            poly_sequence(&map.family, truncation - 1, map.argument)?.into_iter().map(|p| rho.sqrt() * p).collect()
        }
    };
    let basis = basis_for(model, Some(route), Some(energy))?;
    let mut values = Vec::with_capacity(xs.len());
    for &x in xs {
        let p = basis.coordinate.at_x(x)?;
        let v = if p.y > 0.0 && p.y.is_finite() {
            let bv = basis.values_at(&p, truncation)?;
            bv.values.iter().zip(&coefficients).map(|(f, c)| f * c).sum()
        } else {
            0.0
        };
        values.push(v);
    }
    let tail = truncation.div_ceil(10);
    let tail_estimate = coefficients[truncation - tail..].iter().map(|c| c * c).sum::<f64>().sqrt();
    let norm = match label {
        EnergyLabel::Bound(_) if truncation <= NORM_TRUNCATION_CAP => {
            let s = setup(model, Some(route), Some(energy))?;
            let pair = assemble(&s.basis, truncation, |_| 0.0, MatrixOptions::default().tol)?;
            let c = nalgebra::DVector::from_column_slice(&coefficients);
            Some((c.transpose() * &pair.s * &c)[(0, 0)].sqrt())
        }
        _ => None,
    };
    Ok(WavefunctionSample { x: xs.to_vec(), values, truncation, energy, label, tail_estimate, norm })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coulomb() -> PotentialModel {
        PotentialModel::Coulomb { charge: -1.0, ell: 0, lambda: 1.0, nu: None }
    }

    #[test]
    fn hydrogen_ground_state() {
        let xs: Vec<f64> = (1..=200).map(|i| i as f64 * 0.1).collect();
        let w = reconstruct_wavefunction(&coulomb(), Route::Mp, EnergyLabel::Bound(0), &xs, 80).unwrap();
        let err: f64 = xs.iter().zip(&w.values).map(|(r, v)| (v - 2.0 * r * (-r).exp()).powi(2) * 0.1).sum::<f64>().sqrt();
        assert!(err < 1e-4, "L2 error {err}");
        assert!((w.norm.unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hydrogen_2s() {
        let xs: Vec<f64> = (1..=600).map(|i| i as f64 * 0.05).collect();
        // the discrete regime needs λ² < 8|E_k|
        let m = PotentialModel::Coulomb { charge: -1.0, ell: 0, lambda: 0.5, nu: None };
        let w = reconstruct_wavefunction(&m, Route::Mp, EnergyLabel::Bound(1), &xs, 120).unwrap();
        let exact = |r: f64| r / 2f64.sqrt() * (1.0 - 0.5 * r) * (-0.5 * r).exp();
        let sign = w.values[0].signum() * exact(xs[0]).signum() / w.norm.unwrap();
        let err: f64 = xs.iter().zip(&w.values).map(|(r, v)| (sign * v - exact(*r)).powi(2) * 0.05).sum::<f64>().sqrt();
        assert!(err < 1e-4, "L2 error {err}");
        let short = reconstruct_wavefunction(&m, Route::Mp, EnergyLabel::Bound(1), &xs, 60).unwrap();
        assert!(w.tail_estimate < short.tail_estimate);
    }

    #[test]
    fn coulomb_basis_is_tridiagonal() {
        let audit = tridiagonality_audit(&coulomb(), Some(Route::Mp), 30, Some(0.25), MatrixOptions::default()).unwrap();
        assert!(audit.defect < 1e-8, "defect {}", audit.defect);
        assert!(audit.control_defect.unwrap() > 1e-2, "control {:?}", audit.control_defect);
    }

    #[test]
    fn first_basis_function() {
        let v = basis_eval(&coulomb(), Some(Route::Mp), 0, 1.3).unwrap();
        assert!((v - 1.3 * (-0.65f64).exp()).abs() < 1e-14);
        assert_eq!(basis_eval(&coulomb(), Some(Route::Mp), 3, 0.0).unwrap(), 0.0);
    }
}
