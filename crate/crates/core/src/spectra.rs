//! Spectrum formulas and the Jacobi-matrix / Gauss-rule machinery.
//!
//! The Jacobi matrix only sees the recursion coefficients, the direct quadrature
//! only sees the closed-form weight, so comparing the two checks one against the other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyfam::{
    mixed_masses, poly_sequence, recurrence_coeffs, variable_map, weight_density, FamilyParams, VariableMap,
};
use crate::quadrature::{integrate_de, DeConfig, Domain, QuadratureRule};
use crate::tridiag::SymTridiagonal;

/// One bound-state level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub energies: Vec<Level>,
    pub finite: bool,
    /// Largest index when the spectrum is finite.
    pub n_max: Option<usize>,
    /// Set when the last level sits exactly on the threshold (`−μ` an integer).
    pub boundary: bool,
    pub source: String,
}

impl SpectrumResult {
    pub fn values(&self) -> Vec<f64> {
        self.energies.iter().map(|l| l.value).collect()
    }
}

/// Largest integer `≤ −μ`, plus whether `−μ` is itself an integer.
pub fn spectrum_size(mu: f64) -> (usize, bool) {
    let top = (-mu).floor();
    (top as usize, top == -mu)
}

/// Bound-state points `z_k² = −(k+μ)²`.
///
/// CDH and Wilson need `μ < 0` and give `k = 0..=⌊−μ⌋`; Meixner–Pollaczek
/// (in its discrete, `θ → iθ` regime) has an infinite ladder, listed up to `kmax`.
pub fn spectrum_points(params: &FamilyParams, kmax: usize) -> Result<SpectrumResult> {
    match *params {
        FamilyParams::MeixnerPollaczek { mu, .. } => Ok(SpectrumResult {
            energies: (0..=kmax).map(|k| Level { k, value: -(k as f64 + mu).powi(2) }).collect(),
            finite: false,
            n_max: None,
            boundary: false,
            source: "z_k^2 = -(k+mu)^2, k = 0, 1, ...".into(),
        }),
        FamilyParams::ContinuousDualHahn { mu, .. } | FamilyParams::Wilson { mu, .. } => {
            if mu >= 0.0 {
                return Err(Error::Regime(format!("{} with mu = {mu} >= 0 has no discrete spectrum", params.name())));
            }
            let (top, boundary) = spectrum_size(mu);
            Ok(SpectrumResult {
                energies: (0..=top).map(|k| Level { k, value: -(k as f64 + mu).powi(2) }).collect(),
                finite: true,
                n_max: Some(top),
                boundary,
                source: "z_k^2 = -(k+mu)^2, k = 0..floor(-mu)".into(),
            })
        }
        _ => Err(Error::UnsupportedFamily("spectrum formula (Meixner-Pollaczek, continuous dual Hahn, Wilson only)")),
    }
}

/// The `M × M` Jacobi matrix in the recursion variable: diagonal `diag(n)`,
/// off-diagonal `sup(n)`.
pub fn jacobi_matrix(params: &FamilyParams, m: usize) -> Result<SymTridiagonal> {
    if matches!(params, FamilyParams::HPoly { .. }) {
        return Err(Error::UnsupportedFamily("H_n (non-symmetric recursion with z in the diagonal)"));
    }
    if m == 0 {
        return Err(Error::ParameterRange("matrix size must be positive".into()));
    }
    if let Some(size) = params.finite_size() {
        if m > size + 1 {
            return Err(Error::DegreeOutOfRange { degree: m - 1, size });
        }
    }
    let rc = recurrence_coeffs(params, m)?;
    let off = (0..m - 1).map(|n| rc.sup(n)).collect();
    Ok(SymTridiagonal::new(rc.diag, off))
}

// Recursion variable back to the polynomial argument for the continuous families.
fn recursion_to_argument(map: VariableMap, x: f64) -> f64 {
    match map {
        VariableMap::ZSinTheta { sin_theta } => x / sin_theta,
        _ => x,
    }
}

/// Gauss rule of order `M` from the Jacobi matrix.
///
/// Nodes are in the polynomial argument: `z` for Meixner–Pollaczek, `z²` for
/// CDH and Wilson.
pub fn gauss_rule(params: &FamilyParams, m: usize) -> Result<QuadratureRule> {
    if !params.is_continuous() {
        return Err(Error::Regime(format!("{} is not a continuous family", params.name())));
    }
    let mut rule = QuadratureRule::from_jacobi_matrix(&jacobi_matrix(params, m)?)?;
    let map = variable_map(params);
    for x in rule.nodes.iter_mut() {
        *x = recursion_to_argument(map, *x);
    }
    Ok(rule)
}

/// Both sides of the measure cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureCheck {
    /// `Σ w_i P_n(x_i) P_m(x_i)` from the Gauss rule.
    pub gauss: f64,
    /// `∫ ρ P_n P_m` with the closed-form weight.
    pub direct: f64,
}

impl MeasureCheck {
    /// `max(|gauss − δ|, |gauss − direct|)`.
    pub fn defect(&self, delta: f64) -> f64 {
        (self.gauss - delta).abs().max((self.gauss - self.direct).abs())
    }
}

/// Gauss-rule pairing against direct quadrature of the closed-form weight.
pub fn measure_pairings(params: &FamilyParams, m: usize, n1: usize, n2: usize, de: DeConfig) -> Result<MeasureCheck> {
    if n1 + n2 > 2 * m - 1 {
        return Err(Error::ParameterRange(format!("degrees {n1} + {n2} exceed 2M - 1 = {}", 2 * m - 1)));
    }
    let rule = gauss_rule(params, m)?;
    let top = n1.max(n2);
    let mut gauss = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let p = poly_sequence(params, top, x)?;
        gauss += w * p[n1] * p[n2];
    }
    let (domain, squared) = match params {
        FamilyParams::MeixnerPollaczek { .. } => (Domain::WholeLine, false),
        _ => (Domain::HalfLine(0.0), true),
    };
    let mut failure = None;
    let direct = integrate_de(domain, de, |z, _, _| {
        let w = match weight_density(params, z) {
            Ok(w) => w,
            Err(e) => {
                failure.get_or_insert(e);
                return 0.0;
            }
        };
        if w == 0.0 {
            return 0.0;
        }
        let arg = if squared { z * z } else { z };
        match poly_sequence(params, top, arg) {
            Ok(p) => w * p[n1] * p[n2],
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(MeasureCheck { gauss, direct: direct.value })
}

/// Cross-validation defect of the recursion against the closed-form weight.
pub fn measure_crosscheck(params: &FamilyParams, m: usize, n1: usize, n2: usize) -> Result<f64> {
    let delta = if n1 == n2 { 1.0 } else { 0.0 };
    Ok(measure_pairings(params, m, n1, n2, DeConfig::with_tol(1e-12))?.defect(delta))
}

/// Spectral nodes of a finite family in the recursion variable, ascending.
pub fn discrete_nodes(params: &FamilyParams) -> Result<Vec<f64>> {
    let size = params.finite_size().ok_or(Error::UnsupportedFamily("discrete nodes (finite families only)"))?;
    let map = variable_map(params);
    let mut nodes: Vec<f64> = (0..=size).map(|k| map.apply(k as f64)).collect();
    nodes.sort_by(f64::total_cmp);
    Ok(nodes)
}

/// Raw Jacobi-matrix nodes in a mixed regime next to the closed-form discrete
/// points; no attempt is made to classify the raw nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedNodes {
    pub raw_nodes: Vec<f64>,
    pub raw_weights: Vec<f64>,
    pub discrete_points: Vec<f64>,
}

pub fn mixed_regime_nodes(params: &FamilyParams, m: usize) -> Result<MixedNodes> {
    let (discrete_points, _) = mixed_masses(params)?;
    let rule = QuadratureRule::from_jacobi_matrix(&jacobi_matrix(params, m)?)?;
    Ok(MixedNodes { raw_nodes: rule.nodes, raw_weights: rule.weights, discrete_points })
}
