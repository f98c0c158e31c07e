//! Large-degree behaviour of the continuous families and the scattering data
//! read off from it.
//!
//! Each family behaves like `P_n ≈ n^{−1/2} A cos(φ_n + δ)` with a known carrier
//! `φ_n`; the fit keeps `φ_n` fixed and solves a 2×2 linear least-squares problem
//! for `(A cos δ, A sin δ)`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyfam::{check_continuous_regime, poly_sequence, FamilyParams};
use crate::specfun::{arg_gamma, ln_abs_gamma, log_gamma_complex};

/// Decay exponent of the envelope, shared by the three continuous families.
pub const TAU: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScatteringMethod {
    ClosedForm,
    Fitted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringResult {
    pub amplitude: f64,
    /// Principal value in `(−π, π]`.
    pub phase: f64,
    pub method: ScatteringMethod,
    /// Weighted RMS misfit of `√n P_n`; zero for the closed form.
    pub residual: f64,
}

/// Degree window and sampling for the large-`n` fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub n_lo: usize,
    pub n_hi: usize,
    pub samples: usize,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self { n_lo: 1_000, n_hi: 10_000, samples: 2_000 }
    }
}

/// Reduce an angle to `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Distance between two phases on the circle.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

fn require_continuous(params: &FamilyParams) -> Result<()> {
    if !params.is_continuous() {
        return Err(Error::UnsupportedFamily("asymptotics (Meixner-Pollaczek, continuous dual Hahn, Wilson only)"));
    }
    check_continuous_regime(params)
}

/// Polynomial argument for the energy variable `z`.
fn natural_arg(params: &FamilyParams, z: f64) -> f64 {
    match params {
        FamilyParams::MeixnerPollaczek { .. } => z,
        _ => z * z,
    }
}

/// The fixed part `φ_n` of the cosine argument.
pub fn carrier_phase(params: &FamilyParams, z: f64, n: f64) -> Result<f64> {
    match *params {
        // The μθ term keeps the phase offset equal to arg Γ(μ+iz) for the
        // orthonormal normalization.
        FamilyParams::MeixnerPollaczek { mu, theta } => {
            Ok((n + mu) * theta - mu * FRAC_PI_2 - z * (2.0 * n * theta.sin()).ln())
        }
        FamilyParams::ContinuousDualHahn { .. } => Ok(z * n.ln()),
        FamilyParams::Wilson { .. } => Ok(2.0 * z * n.ln()),
        _ => Err(Error::UnsupportedFamily("carrier phase")),
    }
}

/// `ln A` at complex `z`, or `None` where `Γ(μ+iz)` has a pole (the amplitude vanishes).
fn ln_amplitude(params: &FamilyParams, z: Complex64) -> Result<Option<f64>> {
    let iz = Complex64::i() * z;
    let mu = match *params {
        FamilyParams::MeixnerPollaczek { mu, .. } | FamilyParams::ContinuousDualHahn { mu, .. } | FamilyParams::Wilson { mu, .. } => mu,
        _ => return Err(Error::UnsupportedFamily("scattering amplitude")),
    };
    let g_mu = match ln_abs_gamma(mu + iz) {
        Ok(v) => v,
        Err(Error::Pole { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let ln2 = std::f64::consts::LN_2;
    let value = match *params {
        FamilyParams::MeixnerPollaczek { mu, theta } => {
            // orthonormal polynomials carry an extra √Γ(2μ) relative to the monic-style form
            ln2 + (FRAC_PI_2 - theta) * z.re - mu * (2.0 * theta.sin()).ln() - g_mu
                + 0.5 * ln_abs_gamma(Complex64::new(2.0 * mu, 0.0))?
        }
        FamilyParams::ContinuousDualHahn { mu, a, b } => {
            let norm = log_gamma_complex(mu + a)? + log_gamma_complex(mu + b)? + log_gamma_complex(a + b)?;
            ln2 + 0.5 * norm.re - g_mu - ln_abs_gamma(a + iz)? - ln_abs_gamma(b + iz)? + ln_abs_gamma(2.0 * iz)?
        }
        FamilyParams::Wilson { mu, nu, a, b } => {
            let m = Complex64::new(mu, 0.0);
            let n = Complex64::new(nu, 0.0);
            let big_b = log_gamma_complex(m + n)? + log_gamma_complex(a + b)? + log_gamma_complex(m + a)? + log_gamma_complex(m + b)?
                + log_gamma_complex(n + a)?
                + log_gamma_complex(n + b)?
                - log_gamma_complex(m + n + a + b)?;
            1.5 * ln2 + 0.5 * big_b.re - g_mu - ln_abs_gamma(nu + iz)? - ln_abs_gamma(a + iz)? - ln_abs_gamma(b + iz)?
                + ln_abs_gamma(2.0 * iz)?
        }
        _ => unreachable!(),
    };
    Ok(Some(value))
}

/// Closed-form amplitude continued to complex `z`; exactly zero on the
/// bound-state points `μ + iz = −k`.
pub fn amplitude_continued(params: &FamilyParams, z: Complex64) -> Result<f64> {
    Ok(ln_amplitude(params, z)?.map_or(0.0, f64::exp))
}

/// Amplitude and phase shift from the Γ-function formulas.
pub fn closed_form_scattering(params: &FamilyParams, z: f64) -> Result<ScatteringResult> {
    require_continuous(params)?;
    if !z.is_finite() {
        return Err(Error::Domain(format!("z = {z} is not finite")));
    }
    if !matches!(params, FamilyParams::MeixnerPollaczek { .. }) && z <= 0.0 {
        return Err(Error::Domain(format!("z = {z} must be positive for {}", params.name())));
    }
    let iz = Complex64::new(0.0, z);
    let phase = match *params {
        FamilyParams::MeixnerPollaczek { mu, .. } => arg_gamma(mu + iz)?,
        FamilyParams::ContinuousDualHahn { mu, a, b } => {
            arg_gamma(2.0 * iz)? - arg_gamma(mu + iz)? - arg_gamma(a + iz)? - arg_gamma(b + iz)?
        }
        FamilyParams::Wilson { mu, nu, a, b } => {
            arg_gamma(2.0 * iz)? - arg_gamma(mu + iz)? - arg_gamma(nu + iz)? - arg_gamma(a + iz)? - arg_gamma(b + iz)?
        }
        _ => unreachable!(),
    };
    let amplitude = match ln_amplitude(params, Complex64::new(z, 0.0))? {
        Some(l) => l.exp(),
        None => {
            let mu = match *params {
                FamilyParams::MeixnerPollaczek { mu, .. } => mu,
                _ => unreachable!("continuous regime has mu > 0"),
            };
            return Err(Error::Pole { re: mu, im: z });
        }
    };
    Ok(ScatteringResult { amplitude, phase: wrap_phase(phase), method: ScatteringMethod::ClosedForm, residual: 0.0 })
}

/// `(n, P_n)` for every degree in `n_lo..=n_hi`, by plain forward recursion.
pub fn evaluate_large_n(params: &FamilyParams, z: f64, n_lo: usize, n_hi: usize) -> Result<Vec<(usize, f64)>> {
    require_continuous(params)?;
    if n_lo > n_hi {
        return Err(Error::ParameterRange(format!("empty degree range {n_lo}..={n_hi}")));
    }
    let seq = poly_sequence(params, n_hi, natural_arg(params, z))?;
    Ok((n_lo..=n_hi).map(|n| (n, seq[n])).collect())
}

/// `samples` distinct degrees spread evenly over the window.
pub fn sample_degrees(window: &FitWindow) -> Vec<usize> {
    let span = window.n_hi.saturating_sub(window.n_lo);
    if window.samples <= 1 || span == 0 {
        return vec![window.n_lo];
    }
    let mut out: Vec<usize> = (0..window.samples)
        .map(|i| window.n_lo + ((i as f64) * span as f64 / (window.samples - 1) as f64).round() as usize)
        .collect();
    out.dedup();
    out
}

/// Large-`n` fit of amplitude and phase with the carrier held fixed.
///
/// Samples are weighted by `n²`; cosine and sine columns scaled by `1/n` take up
/// the first-order corrections to the leading term.
pub fn fit_scattering(params: &FamilyParams, z: f64, window: &FitWindow) -> Result<ScatteringResult> {
    require_continuous(params)?;
    if window.n_lo == 0 || window.n_hi <= window.n_lo || window.samples < 3 {
        return Err(Error::ParameterRange("fit window needs 0 < n_lo < n_hi and at least 3 samples".into()));
    }
    let seq = poly_sequence(params, window.n_hi, natural_arg(params, z))?;
    let degrees = sample_degrees(window);

    // y ≈ (c + c₁/n) cos φ − (s + s₁/n) sin φ; the 1/n columns absorb the leading
    // phase and amplitude corrections so (c, s) are the n → ∞ values
    let (mut scc, mut sss, mut scs) = (0.0, 0.0, 0.0);
    let mut rows = Vec::with_capacity(degrees.len());
    for &n in &degrees {
        let nf = n as f64;
        let y = nf.powf(TAU) * seq[n];
        let phi = carrier_phase(params, z, nf)?;
        let (cp, sp) = (phi.cos(), -phi.sin());
        let w = nf * nf;
        scc += w * cp * cp;
        sss += w * sp * sp;
        scs += w * cp * sp;
        rows.push((w, nf, cp, sp, y));
    }
    let det = scc * sss - scs * scs;
    let trace = scc + sss;
    if !(det > 1e-10 * trace * trace) {
        return Err(Error::IllConditionedFit(format!(
            "carrier phase barely varies over the window at z = {z}; cosine and sine columns are degenerate"
        )));
    }
    let design = DMatrix::from_fn(rows.len(), 4, |i, j| {
        let (w, nf, cp, sp, _) = rows[i];
        w.sqrt() * [cp, sp, cp / nf, sp / nf][j]
    });
    let rhs = DVector::from_iterator(rows.len(), rows.iter().map(|&(w, _, _, _, y)| w.sqrt() * y));
    let coef = design
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::IllConditionedFit(format!("least-squares solve failed: {e}")))?;
    let (c, s) = (coef[0], coef[1]);
    let sw: f64 = rows.iter().map(|r| r.0).sum();
    let misfit = (&design * &coef - &rhs).norm_squared();
    let amplitude = c.hypot(s);
    let residual = (misfit / sw).sqrt();
    if !(amplitude > 10.0 * residual) {
        return Err(Error::IllConditionedFit(format!(
            "fitted amplitude {amplitude:e} is not resolved above the residual {residual:e}"
        )));
    }
    Ok(ScatteringResult { amplitude, phase: wrap_phase(s.atan2(c)), method: ScatteringMethod::Fitted, residual })
}

/// Log-log slope of the per-octave maxima of `|P_n|`.
///
/// Only octaves `[2^j, 2^{j+1})` lying entirely inside the sampled range are used.
pub fn envelope_slope(values: &[(usize, f64)]) -> Result<f64> {
    let (lo, hi) = match (values.first(), values.last()) {
        (Some(a), Some(b)) => (a.0.max(1), b.0),
        _ => return Err(Error::ParameterRange("no samples".into())),
    };
    let mut points = Vec::new();
    let mut start = lo.next_power_of_two();
    while 2 * start - 1 <= hi {
        let end = 2 * start;
        let peak = values.iter().filter(|(n, _)| *n >= start && *n < end).map(|(_, v)| v.abs()).fold(0.0, f64::max);
        points.push((((start as f64) * (end as f64 - 1.0)).sqrt().ln(), peak.ln()));
        start = end;
    }
    if points.len() < 2 {
        return Err(Error::ParameterRange("need at least two complete octaves".into()));
    }
    let m = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
    Ok(sxy / sxx)
}
