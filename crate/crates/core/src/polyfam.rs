//! The orthonormal polynomial families: recursions, closed forms, weights and
//! orthogonality relations.
//!
//! Each family is evaluated at its *natural* argument:
//!
//! | family                | argument      | recursion variable               |
//! |-----------------------|---------------|----------------------------------|
//! | Meixner–Pollaczek     | `z`           | `z sin θ`                        |
//! | Meixner               | `k`           | `(β − 1) k`                      |
//! | Krawtchouk            | `k`           | `k`                              |
//! | continuous dual Hahn  | `z²`          | `z²`                             |
//! | dual Hahn             | `k`           | `(k + (α+β+1)/2)²`               |
//! | Wilson                | `z²`          | `z²`                             |
//! | Racah                 | `k`           | `¼(N + β − γ − 2k)²`             |
//! | `H_n`                 | `z`           | `cos θ` (with `z` in the diagonal) |
//!
//! The CDH and Wilson families take `z²` so that bound-state points
//! `z² = −(k+μ)²` stay on the real line.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_de, DeConfig, Domain};
use crate::ddouble::{CDd, Dd};
use crate::specfun::{hyp_terminating, hyp_terminating_dd, ln_abs_gamma, ln_gamma_real, log_gamma_complex, pochhammer, HypSeriesSpec};

/// Rescale forward recursions once values pass this magnitude.
const RESCALE_ABOVE: f64 = 1e150;
/// Hard cap on Meixner tail summation.
const MEIXNER_MAX_TERMS: usize = 2_000_000;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Parameters of one polynomial family.
///
/// The checked constructors enforce the documented parameter ranges. Building a
/// variant directly skips validation; that is the escape hatch for exploring
/// regimes outside the standard ranges (for example `μ < 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyParams {
    MeixnerPollaczek { mu: f64, theta: f64 },
    Meixner { mu: f64, beta: f64 },
    Krawtchouk { n: usize, gamma: f64 },
    ContinuousDualHahn { mu: f64, a: Complex64, b: Complex64 },
    DualHahn { n: usize, alpha: f64, beta: f64 },
    Wilson { mu: f64, nu: f64, a: Complex64, b: Complex64 },
    Racah { n: usize, alpha: f64, beta: f64, gamma: f64 },
    HPoly { mu: f64, nu: f64, alpha: f64, theta: f64 },
}

fn range_err(msg: impl Into<String>) -> Error {
    Error::ParameterRange(msg.into())
}

fn conjugate_pair(a: Complex64, b: Complex64) -> bool {
    if a.im == 0.0 && b.im == 0.0 {
        return true;
    }
    let scale = 1.0 + a.norm();
    (a.re - b.re).abs() <= 1e-14 * scale && (a.im + b.im).abs() <= 1e-14 * scale
}

impl FamilyParams {
    pub fn meixner_pollaczek(mu: f64, theta: f64) -> Result<Self> {
        let p = Self::MeixnerPollaczek { mu, theta };
        p.validate()?;
        Ok(p)
    }

    pub fn meixner(mu: f64, beta: f64) -> Result<Self> {
        let p = Self::Meixner { mu, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn krawtchouk(n: usize, gamma: f64) -> Result<Self> {
        let p = Self::Krawtchouk { n, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn continuous_dual_hahn(mu: f64, a: Complex64, b: Complex64) -> Result<Self> {
        let p = Self::ContinuousDualHahn { mu, a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn dual_hahn(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self::DualHahn { n, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn wilson(mu: f64, nu: f64, a: Complex64, b: Complex64) -> Result<Self> {
        let p = Self::Wilson { mu, nu, a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn racah(n: usize, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = Self::Racah { n, alpha, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn h_poly(mu: f64, nu: f64, alpha: f64, theta: f64) -> Result<Self> {
        let p = Self::HPoly { mu, nu, alpha, theta };
        p.validate()?;
        Ok(p)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::MeixnerPollaczek { .. } => "Meixner-Pollaczek",
            Self::Meixner { .. } => "Meixner",
            Self::Krawtchouk { .. } => "Krawtchouk",
            Self::ContinuousDualHahn { .. } => "continuous dual Hahn",
            Self::DualHahn { .. } => "dual Hahn",
            Self::Wilson { .. } => "Wilson",
            Self::Racah { .. } => "Racah",
            Self::HPoly { .. } => "H_n",
        }
    }

    /// Number of nodes minus one for the finite families.
    pub fn finite_size(&self) -> Option<usize> {
        match *self {
            Self::Krawtchouk { n, .. } | Self::DualHahn { n, .. } | Self::Racah { n, .. } => Some(n),
            _ => None,
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, Self::MeixnerPollaczek { .. } | Self::ContinuousDualHahn { .. } | Self::Wilson { .. })
    }

    /// Strict range check.
    pub fn validate(&self) -> Result<()> {
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        match *self {
            Self::MeixnerPollaczek { mu, theta } => {
                if !finite(&[mu, theta]) || mu <= 0.0 || theta <= 0.0 || theta >= std::f64::consts::PI {
                    return Err(range_err(format!("Meixner-Pollaczek needs mu > 0 and 0 < theta < pi (mu = {mu}, theta = {theta})")));
                }
            }
            Self::Meixner { mu, beta } => {
                if !finite(&[mu, beta]) || mu <= 0.0 || beta <= 0.0 || beta >= 1.0 {
                    return Err(range_err(format!("Meixner needs mu > 0 and 0 < beta < 1 (mu = {mu}, beta = {beta})")));
                }
            }
            Self::Krawtchouk { gamma, .. } => {
                if !gamma.is_finite() || gamma <= 0.0 || gamma >= 1.0 {
                    return Err(range_err(format!("Krawtchouk needs 0 < gamma < 1 (gamma = {gamma})")));
                }
            }
            Self::ContinuousDualHahn { mu, a, b } => {
                if !finite(&[mu, a.re, a.im, b.re, b.im]) {
                    return Err(range_err("continuous dual Hahn parameters must be finite"));
                }
                if !conjugate_pair(a, b) {
                    return Err(range_err("non-real a, b must be a conjugate pair"));
                }
                if (mu + a).re <= 0.0 || (mu + b).re <= 0.0 || (a + b).re <= 0.0 {
                    return Err(range_err(format!("continuous dual Hahn needs Re(mu+a), Re(mu+b), a+b > 0 (mu = {mu}, a = {a}, b = {b})")));
                }
                if mu < 0.0 && mu.fract() == 0.0 {
                    return Err(range_err("mu must not be a negative integer"));
                }
            }
            Self::DualHahn { n, alpha, beta } => {
                let nf = n as f64;
                let ok = (alpha > -1.0 && beta > -1.0) || (alpha < -nf && beta < -nf);
                if !finite(&[alpha, beta]) || !ok {
                    return Err(range_err(format!("dual Hahn needs alpha, beta > -1 or alpha, beta < -N (alpha = {alpha}, beta = {beta}, N = {n})")));
                }
            }
            Self::Wilson { mu, nu, a, b } => {
                if !finite(&[mu, nu, a.re, a.im, b.re, b.im]) {
                    return Err(range_err("Wilson parameters must be finite"));
                }
                if !conjugate_pair(a, b) {
                    return Err(range_err("non-real a, b must be a conjugate pair"));
                }
                let sums = [mu + nu, (mu + a).re, (mu + b).re, (nu + a).re, (nu + b).re, (a + b).re];
                if sums.iter().any(|&s| s <= 0.0) {
                    return Err(range_err(format!(
                        "Wilson needs mu+nu, Re(mu+a), Re(mu+b), Re(nu+a), Re(nu+b), a+b > 0 (mu = {mu}, nu = {nu}, a = {a}, b = {b})"
                    )));
                }
                if mu < 0.0 && mu.fract() == 0.0 {
                    return Err(range_err("mu must not be a negative integer"));
                }
            }
            Self::Racah { n, alpha, beta, gamma } => {
                if !finite(&[alpha, beta, gamma]) {
                    return Err(range_err("Racah parameters must be finite"));
                }
                let w = racah_weights(n, alpha, beta, gamma)?;
                if w.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                    return Err(range_err(format!(
                        "Racah weights must be positive for k = 0..N (alpha = {alpha}, beta = {beta}, gamma = {gamma}, N = {n})"
                    )));
                }
                for deg in 0..=n {
                    let p = racah_norm_sq(deg, n, alpha, beta, gamma);
                    if !(p.is_finite() && p > 0.0) {
                        return Err(range_err(format!("Racah normalization is not positive at degree {deg}")));
                    }
                }
            }
            Self::HPoly { mu, nu, alpha, theta } => {
                if !finite(&[mu, nu, alpha, theta]) || mu <= -1.0 || nu <= -1.0 || !(0.0..=std::f64::consts::PI).contains(&theta) {
                    return Err(range_err(format!("H_n needs mu, nu > -1 and 0 <= theta <= pi (mu = {mu}, nu = {nu}, theta = {theta})")));
                }
            }
        }
        Ok(())
    }

    fn check_degree(&self, degree: usize) -> Result<()> {
        match self.finite_size() {
            Some(size) if degree > size => Err(Error::DegreeOutOfRange { degree, size }),
            _ => Ok(()),
        }
    }
}

/// How the natural argument enters the left side of the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum VariableMap {
    /// `x = z sin θ`
    ZSinTheta { sin_theta: f64 },
    /// `x = (β − 1) k`
    ScaledK { factor: f64 },
    /// `x = k`
    K,
    /// `x = z²` (the argument is already `z²`)
    ZSquared,
    /// `x = (k + shift)²`
    ShiftedKSquared { shift: f64 },
    /// `x = ¼(c − 2k)²`
    RacahQuadratic { c: f64 },
    /// `x = cos θ`; the argument `z` enters the diagonal instead.
    CosTheta { cos_theta: f64 },
}

impl VariableMap {
    /// Recursion variable for a natural argument.
    pub fn apply(&self, arg: f64) -> f64 {
        match *self {
            Self::ZSinTheta { sin_theta } => arg * sin_theta,
            Self::ScaledK { factor } => factor * arg,
            Self::K | Self::ZSquared => arg,
            Self::ShiftedKSquared { shift } => (arg + shift) * (arg + shift),
            Self::RacahQuadratic { c } => 0.25 * (c - 2.0 * arg) * (c - 2.0 * arg),
            Self::CosTheta { cos_theta } => cos_theta,
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Self::ZSinTheta { .. } => "z sin(theta)",
            Self::ScaledK { .. } => "(beta - 1) k",
            Self::K => "k",
            Self::ZSquared => "z^2",
            Self::ShiftedKSquared { .. } => "(k + (alpha+beta+1)/2)^2",
            Self::RacahQuadratic { .. } => "(N + beta - gamma - 2k)^2 / 4",
            Self::CosTheta { .. } => "cos(theta)",
        }
    }
}

/// Coefficients of `x P_n = diag(n) P_n + lower(n) P_{n−1} + upper(n) P_{n+1}`.
///
/// `upper` and `lower` keep their signs; `sup`/`sub` are their magnitudes.
/// For the orthonormal families `lower(n+1) = upper(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceCoefficients {
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    /// `H_n` only: the diagonal is `diag(n) + z · diag_slope(n)`.
    pub diag_slope: Option<Vec<f64>>,
    pub variable: VariableMap,
}

impl RecurrenceCoefficients {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn sup(&self, n: usize) -> f64 {
        self.upper[n].abs()
    }

    pub fn sub(&self, n: usize) -> f64 {
        self.lower[n].abs()
    }

    /// Largest `|lower(n+1) − upper(n)|`.
    pub fn symmetry_defect(&self) -> f64 {
        (0..self.len().saturating_sub(1))
            .map(|n| (self.lower[n + 1] - self.upper[n]).abs())
            .fold(0.0, f64::max)
    }
}

/// Recursion variable map of a family.
pub fn variable_map(params: &FamilyParams) -> VariableMap {
    match *params {
        FamilyParams::MeixnerPollaczek { theta, .. } => VariableMap::ZSinTheta { sin_theta: theta.sin() },
        FamilyParams::Meixner { beta, .. } => VariableMap::ScaledK { factor: beta - 1.0 },
        FamilyParams::Krawtchouk { .. } => VariableMap::K,
        FamilyParams::ContinuousDualHahn { .. } | FamilyParams::Wilson { .. } => VariableMap::ZSquared,
        FamilyParams::DualHahn { alpha, beta, .. } => VariableMap::ShiftedKSquared { shift: 0.5 * (alpha + beta + 1.0) },
        FamilyParams::Racah { n, beta, gamma, .. } => VariableMap::RacahQuadratic { c: n as f64 + beta - gamma },
        FamilyParams::HPoly { theta, .. } => VariableMap::CosTheta { cos_theta: theta.cos() },
    }
}

fn racah_a(n: f64, size: f64, al: f64, be: f64) -> f64 {
    let s = al + be;
    (n + 1.0) * (n - size) * (n + s + 1.0) * (n + size + s + 2.0) / ((2.0 * n + s + 1.0) * (2.0 * n + s + 2.0))
}

fn racah_c(n: f64, al: f64, be: f64, ga: f64) -> f64 {
    let s = al + be;
    if n == 0.0 {
        return 0.0;
    }
    (n + al) * (n + be) * (n + ga) * (n + s - ga) / ((2.0 * n + s) * (2.0 * n + s + 1.0))
}

/// `(diag, upper)` at degree `n` for the symmetric families.
fn symmetric_coeffs(params: &FamilyParams, n: usize) -> (f64, f64) {
    let nf = n as f64;
    match *params {
        FamilyParams::MeixnerPollaczek { mu, theta } => {
            (-(nf + mu) * theta.cos(), 0.5 * ((nf + 1.0) * (nf + 2.0 * mu)).sqrt())
        }
        FamilyParams::Meixner { mu, beta } => (
            -(nf * (1.0 + beta) + 2.0 * mu * beta),
            ((nf + 1.0) * (nf + 2.0 * mu) * beta).sqrt(),
        ),
        FamilyParams::Krawtchouk { n: size, gamma } => {
            let sz = size as f64;
            let up = if n < size { -((nf + 1.0) * (sz - nf) * gamma * (1.0 - gamma)).sqrt() } else { 0.0 };
            (sz * gamma + nf * (1.0 - 2.0 * gamma), up)
        }
        FamilyParams::ContinuousDualHahn { mu, a, b } => {
            let d = (nf + mu + a) * (nf + mu + b) + nf * (nf + a + b - 1.0) - mu * mu;
            let u = (nf + 1.0) * (nf + a + b) * (nf + mu + a) * (nf + mu + b);
            (d.re, -u.re.max(0.0).sqrt())
        }
        FamilyParams::DualHahn { n: size, alpha, beta } => {
            let sz = size as f64;
            let d = (nf + alpha + 1.0) * (sz - nf) + nf * (sz + beta + 1.0 - nf) + 0.25 * (alpha + beta + 1.0).powi(2);
            // the sign follows the leading coefficient of the closed form, which
            // flips between the alpha > -1 and alpha < -N branches
            let up = if n < size {
                -(nf + alpha + 1.0).signum() * ((nf + 1.0) * (nf + alpha + 1.0) * (sz - nf) * (sz - nf + beta)).abs().sqrt()
            } else {
                0.0
            };
            (d, up)
        }
        FamilyParams::Wilson { mu, nu, a, b } => {
            let s = mu + nu + a + b;
            let t1 = (nf + mu + nu) * (nf + mu + a) * (nf + mu + b) * (nf + s - 1.0) / ((2.0 * nf + s) * (2.0 * nf + s - 1.0));
            let t2 = if n == 0 {
                cx(0.0)
            } else {
                nf * (nf + nu + a - 1.0) * (nf + nu + b - 1.0) * (nf + a + b - 1.0) / ((2.0 * nf + s - 1.0) * (2.0 * nf + s - 2.0))
            };
            let d = t1 + t2 - mu * mu;
            let num = (nf + 1.0)
                * (nf + mu + nu)
                * (nf + a + b)
                * (nf + mu + a)
                * (nf + mu + b)
                * (nf + nu + a)
                * (nf + nu + b)
                * (nf + s - 1.0)
                / ((2.0 * nf + s - 1.0) * (2.0 * nf + s + 1.0));
            let up = num.re.max(0.0).sqrt() / (2.0 * nf + s).re;
            (d.re, -up)
        }
        FamilyParams::Racah { n: size, alpha, beta, gamma } => {
            let sz = size as f64;
            let a_n = racah_a(nf, sz, alpha, beta);
            let s = alpha + beta;
            let diag_a = (nf - sz) * (nf + alpha + 1.0) * (nf + gamma + 1.0) * (nf + s + 1.0) / ((2.0 * nf + s + 1.0) * (2.0 * nf + s + 2.0));
            let diag_c = if n == 0 {
                0.0
            } else {
                nf * (nf + beta) * (nf + s - gamma) * (nf + sz + s + 1.0) / ((2.0 * nf + s) * (2.0 * nf + s + 1.0))
            };
            let d = 0.25 * (sz + beta - gamma).powi(2) - diag_a - diag_c;
            let up = if n < size {
                let prod = a_n * racah_c(nf + 1.0, alpha, beta, gamma);
                a_n.signum() * prod.abs().sqrt()
            } else {
                0.0
            };
            (d, up)
        }
        FamilyParams::HPoly { .. } => unreachable!("H_n is not symmetric"),
    }
}

/// `(diag at z = 0, diag slope in z, lower, upper)` for `H_n`.
fn h_coeffs(mu: f64, nu: f64, alpha: f64, theta: f64, n: usize) -> (f64, f64, f64, f64) {
    let nf = n as f64;
    let s = mu + nu;
    let slope = theta.sin() * ((nf + 0.5 * (s + 1.0)).powi(2) + alpha);
    if n == 0 {
        // limits taken before dividing so that mu + nu = 0 or -1 is harmless
        return ((nu - mu) / (s + 2.0), slope, 0.0, 2.0 / (s + 2.0));
    }
    let d0 = (nu * nu - mu * mu) / ((2.0 * nf + s) * (2.0 * nf + s + 2.0));
    let lower = 2.0 * (nf + mu) * (nf + nu) / ((2.0 * nf + s) * (2.0 * nf + s + 1.0));
    let upper = 2.0 * (nf + 1.0) * (nf + s + 1.0) / ((2.0 * nf + s + 1.0) * (2.0 * nf + s + 2.0));
    (d0, slope, lower, upper)
}

/// Recursion coefficients for degrees `0..len`.
///
/// Finite families are clipped to `N + 1` entries.
pub fn recurrence_coeffs(params: &FamilyParams, len: usize) -> Result<RecurrenceCoefficients> {
    let variable = variable_map(params);
    if let FamilyParams::HPoly { mu, nu, alpha, theta } = *params {
        let (mut diag, mut slope, mut lower, mut upper) = (vec![], vec![], vec![], vec![]);
        for n in 0..len {
            let (d, s, l, u) = h_coeffs(mu, nu, alpha, theta, n);
            diag.push(d);
            slope.push(s);
            lower.push(l);
            upper.push(u);
        }
        return Ok(RecurrenceCoefficients { diag, upper, lower, diag_slope: Some(slope), variable });
    }
    let len = params.finite_size().map_or(len, |size| len.min(size + 1));
    let mut diag = Vec::with_capacity(len);
    let mut upper = Vec::with_capacity(len);
    let mut lower = Vec::with_capacity(len);
    for n in 0..len {
        let (d, u) = symmetric_coeffs(params, n);
        lower.push(if n == 0 { 0.0 } else { upper[n - 1] });
        diag.push(d);
        upper.push(u);
    }
    Ok(RecurrenceCoefficients { diag, upper, lower, diag_slope: None, variable })
}

/// A value `mantissa · e^{log_scale}` from an overflow-guarded recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl ScaledValue {
    pub fn value(&self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }

    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.log_scale
    }
}

/// Degrees `0..=n_max` at argument `arg` by forward recursion from `P₋₁ = 0`, `P₀ = 1`.
///
/// At a node `k ∈ {0..N}` of a finite family the sequence is an eigenvector of
/// the Jacobi matrix and may decay by many orders of magnitude, which forward
/// recursion cannot follow; there the recursion is also run down from
/// `P_{N+1} = 0` and the two runs are joined at the peak.
///
/// For `H_n` the argument is `z`.
pub fn poly_sequence(params: &FamilyParams, n_max: usize, arg: f64) -> Result<Vec<f64>> {
    params.check_degree(n_max)?;
    let mut out = Vec::with_capacity(n_max + 1);
    match params.finite_size() {
        Some(size) if is_node(arg, size) => {
            let full = two_sided(params, size, arg);
            out.extend_from_slice(&full[..=n_max]);
        }
        _ => {
            forward(params, n_max, arg, |_, p| out.push(p));
        }
    }
    Ok(out)
}

fn is_node(arg: f64, size: usize) -> bool {
    arg >= 0.0 && arg <= size as f64 && arg == arg.round()
}

// Forward run up to N, backward run from P_{N+1} = 0, joined at the largest
// forward value.
fn two_sided(params: &FamilyParams, size: usize, arg: f64) -> Vec<f64> {
    let mut f = Vec::with_capacity(size + 1);
    forward(params, size, arg, |_, p| f.push(p));
    let x = variable_map(params).apply(arg);
    let coeffs: Vec<(f64, f64)> = (0..=size).map(|n| symmetric_coeffs(params, n)).collect();
    let mut b = vec![0.0; size + 1];
    b[size] = 1.0;
    for n in (1..=size).rev() {
        let above = if n < size { coeffs[n].1 * b[n + 1] } else { 0.0 };
        b[n - 1] = ((x - coeffs[n].0) * b[n] - above) / coeffs[n - 1].1;
    }
    let m = (0..=size).max_by(|&i, &j| f[i].abs().total_cmp(&f[j].abs())).unwrap_or(0);
    if b[m] == 0.0 || !b[m].is_finite() {
        return f;
    }
    let scale = f[m] / b[m];
    (0..=size).map(|n| if n <= m { f[n] } else { scale * b[n] }).collect()
}

// Runs the recursion, handing each value to `sink`; returns the final value.
fn forward(params: &FamilyParams, n_max: usize, arg: f64, mut sink: impl FnMut(usize, f64)) -> f64 {
    let x = variable_map(params).apply(arg);
    let (mut prev, mut cur) = (0.0, 1.0);
    sink(0, cur);
    let mut lower_prev = 0.0;
    for n in 0..n_max {
        let next = match *params {
            FamilyParams::HPoly { mu, nu, alpha, theta } => {
                let (d0, slope, lower, upper) = h_coeffs(mu, nu, alpha, theta, n);
                ((x - d0 - arg * slope) * cur - lower * prev) / upper
            }
            _ => {
                let (d, up) = symmetric_coeffs(params, n);
                let next = ((x - d) * cur - lower_prev * prev) / up;
                lower_prev = up;
                next
            }
        };
        prev = cur;
        cur = next;
        sink(n + 1, cur);
    }
    cur
}

/// Degree-`n` value by recursion (two-sided at the nodes of finite families,
/// see [`poly_sequence`]).
pub fn poly_eval_recursion(params: &FamilyParams, n: usize, arg: f64) -> Result<f64> {
    params.check_degree(n)?;
    match params.finite_size() {
        Some(size) if is_node(arg, size) => Ok(two_sided(params, size, arg)[n]),
        _ => Ok(forward(params, n, arg, |_, _| {})),
    }
}

/// Forward recursion with a running log-scale, for arguments where the
/// polynomials grow exponentially (bound-state region, large degree).
pub fn poly_eval_recursion_scaled(params: &FamilyParams, n: usize, arg: f64) -> Result<ScaledValue> {
    params.check_degree(n)?;
    let x = variable_map(params).apply(arg);
    let (mut prev, mut cur, mut log_scale) = (0.0f64, 1.0f64, 0.0f64);
    let mut lower_prev = 0.0;
    for k in 0..n {
        let next = match *params {
            FamilyParams::HPoly { mu, nu, alpha, theta } => {
                let (d0, slope, lower, upper) = h_coeffs(mu, nu, alpha, theta, k);
                ((x - d0 - arg * slope) * cur - lower * prev) / upper
            }
            _ => {
                let (d, up) = symmetric_coeffs(params, k);
                let next = ((x - d) * cur - lower_prev * prev) / up;
                lower_prev = up;
                next
            }
        };
        prev = cur;
        cur = next;
        let m = cur.abs().max(prev.abs());
        if m > RESCALE_ABOVE {
            prev /= m;
            cur /= m;
            log_scale += m.ln();
        }
    }
    Ok(ScaledValue { mantissa: cur, log_scale })
}

fn dd_real(parts: &[f64]) -> CDd {
    CDd::real(Dd::sum(parts))
}

fn dd_complex(x: f64, c: Complex64) -> CDd {
    CDd::new(Dd::sum(&[x, c.re]), Dd::new(c.im))
}

// Upper parameters `μ ± iz` from the argument `z²`.
fn mu_pm_iz(mu: f64, z2: f64) -> (CDd, CDd) {
    let root = Dd::new(z2.abs()).sqrt();
    let m = Dd::new(mu);
    if z2 >= 0.0 {
        (CDd::new(m, root), CDd::new(m, -root))
    } else {
        (CDd::real(m + root), CDd::real(m - root))
    }
}

fn sqrt_positive(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v.sqrt())
    } else {
        Err(Error::Domain(format!("{what} normalization {v:e} is not a non-negative real")))
    }
}

fn racah_norm_sq(n: usize, size: usize, al: f64, be: f64, ga: f64) -> f64 {
    let nf = n as f64;
    let s = al + be;
    let lead = if n == 0 { 1.0 } else { (2.0 * nf + s + 1.0) / (nf + s + 1.0) };
    let num = pochhammer(cx(-(size as f64)), n) * pochhammer(cx(al + 1.0), n) * pochhammer(cx(ga + 1.0), n) * pochhammer(cx(s + 2.0), n);
    let den = pochhammer(cx(be + 1.0), n)
        * pochhammer(cx(s - ga + 1.0), n)
        * pochhammer(cx(s + size as f64 + 2.0), n)
        * pochhammer(cx(1.0), n);
    lead * (num / den).re
}

/// Degree-`n` value from the hypergeometric closed form.
pub fn poly_eval_closed(params: &FamilyParams, n: usize, arg: f64) -> Result<f64> {
    params.check_degree(n)?;
    let nf = n as f64;
    let m = -nf;
    match *params {
        FamilyParams::MeixnerPollaczek { mu, theta } => {
            let pre = (pochhammer(cx(2.0 * mu), n).re / pochhammer(cx(1.0), n).re).sqrt();
            let arg2 = cx(1.0) - Complex64::from_polar(1.0, -2.0 * theta);
            let f = hyp_terminating(&HypSeriesSpec::new(vec![cx(m), Complex64::new(mu, arg)], vec![cx(2.0 * mu)], arg2, n))?;
            Ok(pre * (Complex64::from_polar(1.0, nf * theta) * f).re)
        }
        FamilyParams::Meixner { mu, beta } => {
            let pre = (pochhammer(cx(2.0 * mu), n).re / pochhammer(cx(1.0), n).re).sqrt() * beta.powf(0.5 * nf);
            let f = hyp_terminating(&HypSeriesSpec::real(&[m, -arg], &[2.0 * mu], 1.0 - 1.0 / beta, n))?;
            Ok(pre * f.re)
        }
        FamilyParams::Krawtchouk { n: size, gamma } => {
            let ln_binom = ln_gamma_real(size as f64 + 1.0)? - ln_gamma_real(nf + 1.0)? - ln_gamma_real((size - n) as f64 + 1.0)?;
            let pre = (0.5 * ln_binom).exp() * (gamma / (1.0 - gamma)).powf(0.5 * nf);
            let f = hyp_terminating(&HypSeriesSpec::real(&[m, -arg], &[-(size as f64)], 1.0 / gamma, n))?;
            Ok(pre * f.re)
        }
        FamilyParams::ContinuousDualHahn { mu, a, b } => {
            let num = pochhammer(mu + a, n) * pochhammer(mu + b, n);
            let den = pochhammer(cx(1.0), n) * pochhammer(a + b, n);
            let pre = sqrt_positive((num / den).re, "continuous dual Hahn")?;
            let (p, q) = mu_pm_iz(mu, arg);
            let f = hyp_terminating_dd(&[dd_real(&[m]), p, q], &[dd_complex(mu, a), dd_complex(mu, b)], dd_real(&[1.0]), n)?;
            Ok(pre * f.re)
        }
        FamilyParams::DualHahn { n: size, alpha, beta } => {
            let sz = size as f64;
            let num = pochhammer(cx(alpha + 1.0), n) * pochhammer(cx(sz - nf + 1.0), n);
            let den = pochhammer(cx(1.0), n) * pochhammer(cx(sz + beta - nf + 1.0), n);
            let pre = sqrt_positive((num / den).re, "dual Hahn")?;
            let f = hyp_terminating_dd(
                &[dd_real(&[m]), dd_real(&[-arg]), dd_real(&[arg, alpha, beta, 1.0])],
                &[dd_real(&[alpha, 1.0]), dd_real(&[-sz])],
                dd_real(&[1.0]),
                n,
            )?;
            Ok(pre * f.re)
        }
        FamilyParams::Wilson { mu, nu, a, b } => {
            let s = mu + nu + a + b;
            let lead = if n == 0 { cx(1.0) } else { (2.0 * nf + s - 1.0) / (nf + s - 1.0) };
            let num = pochhammer(mu + a, n) * pochhammer(mu + b, n) * pochhammer(cx(mu + nu), n) * pochhammer(s, n);
            let den = pochhammer(nu + a, n) * pochhammer(nu + b, n) * pochhammer(a + b, n) * pochhammer(cx(1.0), n);
            let pre = sqrt_positive((lead * num / den).re, "Wilson")?;
            let (p, q) = mu_pm_iz(mu, arg);
            let second = CDd::new(Dd::sum(&[nf, mu, nu, a.re, b.re, -1.0]), Dd::sum(&[a.im, b.im]));
            let f = hyp_terminating_dd(
                &[dd_real(&[m]), second, p, q],
                &[dd_real(&[mu, nu]), dd_complex(mu, a), dd_complex(mu, b)],
                dd_real(&[1.0]),
                n,
            )?;
            Ok(pre * f.re)
        }
        FamilyParams::Racah { n: size, alpha, beta, gamma } => {
            let pre = sqrt_positive(racah_norm_sq(n, size, alpha, beta, gamma), "Racah")?;
            Ok(pre * racah_bar(n, size, alpha, beta, gamma, arg)?)
        }
        FamilyParams::HPoly { .. } => Err(Error::UnsupportedFamily("H_n (defined only by its recursion)")),
    }
}

fn racah_bar(n: usize, size: usize, al: f64, be: f64, ga: f64, k: f64) -> Result<f64> {
    let sz = size as f64;
    let f = hyp_terminating_dd(
        &[dd_real(&[-(n as f64)]), dd_real(&[-k]), dd_real(&[n as f64, al, be, 1.0]), dd_real(&[k, -be, ga, -sz])],
        &[dd_real(&[al, 1.0]), dd_real(&[ga, 1.0]), dd_real(&[-sz])],
        dd_real(&[1.0]),
        n,
    )?;
    Ok(f.re)
}

/// The renormalized Racah polynomial `R̃_n` whose prefactor is
/// `(α+1)_n (γ+1)_n / ((α+β+N+2)_n n!)`.
pub fn racah_renormalized(n: usize, size: usize, alpha: f64, beta: f64, gamma: f64, k: f64) -> Result<f64> {
    if n > size {
        return Err(Error::DegreeOutOfRange { degree: n, size });
    }
    let pre = (pochhammer(cx(alpha + 1.0), n) * pochhammer(cx(gamma + 1.0), n)
        / (pochhammer(cx(alpha + beta + size as f64 + 2.0), n) * pochhammer(cx(1.0), n)))
    .re;
    Ok(pre * racah_bar(n, size, alpha, beta, gamma, k)?)
}

/// Natural log of the continuous weight density at real `z`.
pub fn ln_weight_density(params: &FamilyParams, z: f64) -> Result<f64> {
    let iz = Complex64::new(0.0, z);
    match *params {
        FamilyParams::MeixnerPollaczek { mu, theta } => Ok(-(2.0 * std::f64::consts::PI).ln() - ln_gamma_real(2.0 * mu)?
            + 2.0 * mu * (2.0 * theta.sin()).ln()
            + (2.0 * theta - std::f64::consts::PI) * z
            + 2.0 * ln_abs_gamma(mu + iz)?),
        FamilyParams::ContinuousDualHahn { mu, a, b } => {
            if z == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            let top = ln_abs_gamma(mu + iz)? + ln_abs_gamma(a + iz)? + ln_abs_gamma(b + iz)? - ln_abs_gamma(2.0 * iz)?;
            let norm = log_gamma_complex(mu + a)? + log_gamma_complex(mu + b)? + log_gamma_complex(a + b)?;
            Ok(2.0 * top - (2.0 * std::f64::consts::PI).ln() - norm.re)
        }
        FamilyParams::Wilson { mu, nu, a, b } => {
            if z == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            let top = ln_abs_gamma(mu + iz)? + ln_abs_gamma(nu + iz)? + ln_abs_gamma(a + iz)? + ln_abs_gamma(b + iz)?
                - ln_abs_gamma(2.0 * iz)?;
            let norm = log_gamma_complex(cx(mu + nu))? + log_gamma_complex(a + b)? + log_gamma_complex(mu + a)? + log_gamma_complex(mu + b)?
                + log_gamma_complex(nu + a)?
                + log_gamma_complex(nu + b)?
                - log_gamma_complex(mu + nu + a + b)?;
            Ok(2.0 * top - (2.0 * std::f64::consts::PI).ln() - norm.re)
        }
        _ => Err(Error::UnsupportedFamily("continuous density of a discrete family")),
    }
}

/// Continuous weight density at real `z`.
pub fn weight_density(params: &FamilyParams, z: f64) -> Result<f64> {
    Ok(ln_weight_density(params, z)?.exp())
}

fn racah_weights(size: usize, al: f64, be: f64, ga: f64) -> Result<Vec<f64>> {
    let sz = size as f64;
    let p = |a: f64, k: usize| pochhammer(cx(a), k);
    let lead = (p(-be - sz, size) * p(ga - al - be - sz, size) / (p(-al - be - sz - 1.0, size) * p(ga - be - sz + 1.0, size))).re;
    Ok((0..=size)
        .map(|k| {
            let kf = k as f64;
            let c = ga - be - sz;
            let frac = if k == 0 { 1.0 } else { (2.0 * kf + c) / (kf + c) };
            let num = p(-sz, k) * p(al + 1.0, k) * p(ga + 1.0, k) * p(c + 1.0, k);
            let den = p(-be - sz, k) * p(ga - be + 1.0, k) * p(ga - al - be - sz, k) * p(1.0, k);
            lead * frac * (num / den).re
        })
        .collect())
}

fn meixner_ln_weight(mu: f64, beta: f64, k: f64) -> Result<f64> {
    Ok(2.0 * mu * (1.0 - beta).ln() + ln_gamma_real(k + 2.0 * mu)? + k * beta.ln() - ln_gamma_real(2.0 * mu)? - ln_gamma_real(k + 1.0)?)
}

/// Discrete weight `ω_k` for the discrete families.
pub fn discrete_weight(params: &FamilyParams, k: usize) -> Result<f64> {
    let kf = k as f64;
    match *params {
        FamilyParams::Meixner { mu, beta } => Ok(meixner_ln_weight(mu, beta, kf)?.exp()),
        FamilyParams::Krawtchouk { n, gamma } => {
            if k > n {
                return Err(Error::DegreeOutOfRange { degree: k, size: n });
            }
            let nf = n as f64;
            let ln = ln_gamma_real(nf + 1.0)? - ln_gamma_real(nf - kf + 1.0)? - ln_gamma_real(kf + 1.0)?
                + kf * gamma.ln()
                + (nf - kf) * (1.0 - gamma).ln();
            Ok(ln.exp())
        }
        FamilyParams::DualHahn { n, alpha, beta } => {
            if k > n {
                return Err(Error::DegreeOutOfRange { degree: k, size: n });
            }
            let nf = n as f64;
            let num = pochhammer(cx(beta + 1.0), n) * (2.0 * kf + alpha + beta + 1.0) * pochhammer(cx(alpha + 1.0), k) * pochhammer(cx(nf - kf + 1.0), k);
            let den = pochhammer(cx(kf + alpha + beta + 1.0), n + 1) * pochhammer(cx(beta + 1.0), k) * pochhammer(cx(1.0), k);
            Ok((num / den).re)
        }
        FamilyParams::Racah { n, alpha, beta, gamma } => {
            if k > n {
                return Err(Error::DegreeOutOfRange { degree: k, size: n });
            }
            Ok(racah_weights(n, alpha, beta, gamma)?[k])
        }
        _ => Err(Error::UnsupportedFamily("discrete weight of a continuous family")),
    }
}

/// Where the continuous measure lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    /// `(−∞, ∞)`
    RealLine,
    /// `(0, ∞)`
    PositiveHalfLine,
}

/// The orthogonality measure of a family.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// Density given by [`weight_density`] of the stored parameters.
    Continuous { params: FamilyParams, support: Support },
    /// Masses at `k = 0, 1, …`; `truncated` marks an infinite set cut where the
    /// remaining tail is below the summation tolerance.
    Discrete { nodes: Vec<f64>, masses: Vec<f64>, truncated: bool },
}

impl WeightSpec {
    pub fn density(&self, z: f64) -> Result<f64> {
        match self {
            Self::Continuous { params, .. } => weight_density(params, z),
            Self::Discrete { .. } => Err(Error::Regime("discrete measure has no density".into())),
        }
    }

    /// Total mass (1 for a normalized measure).
    pub fn total_mass(&self, de: DeConfig) -> Result<f64> {
        match self {
            Self::Continuous { params, support } => {
                let domain = match support {
                    Support::RealLine => Domain::WholeLine,
                    Support::PositiveHalfLine => Domain::HalfLine(0.0),
                };
                Ok(integrate_de(domain, de, |z, _, _| weight_density(params, z).unwrap_or(f64::NAN))?.value)
            }
            Self::Discrete { masses, .. } => Ok(masses.iter().sum()),
        }
    }
}

pub(crate) fn check_continuous_regime(params: &FamilyParams) -> Result<()> {
    match *params {
        FamilyParams::ContinuousDualHahn { mu, a, .. } if mu <= 0.0 || a.re <= 0.0 => Err(Error::Regime(format!(
            "continuous dual Hahn with mu = {mu}, Re a = {} has a mixed measure; use the generalized relation",
            a.re
        ))),
        FamilyParams::Wilson { mu, nu, a, .. } if mu <= 0.0 || nu <= 0.0 || a.re <= 0.0 => Err(Error::Regime(format!(
            "Wilson with mu = {mu} has a mixed measure; use the generalized relation"
        ))),
        _ => Ok(()),
    }
}

/// Largest `k` needed for Meixner sums of degrees up to `n_max`.
fn meixner_cutoff(mu: f64, beta: f64, n_max: usize, tail_tol: f64) -> Result<usize> {
    // ω_k · (poly growth k^{n_max}) has a ratio → β; stop once it is both past
    // its peak and below tolerance.
    let growth = n_max as f64;
    let ln_term = |k: f64| -> Result<f64> { Ok(meixner_ln_weight(mu, beta, k)? + 2.0 * growth * (k + 1.0).ln()) };
    let mut peak = f64::NEG_INFINITY;
    for k in 0..MEIXNER_MAX_TERMS {
        let t = ln_term(k as f64)?;
        peak = peak.max(t);
        let next = ln_term(k as f64 + 1.0)?;
        if next < t && t - peak < tail_tol.ln() + (1.0 - beta).ln() {
            return Ok(k);
        }
    }
    Err(Error::QuadratureNonConvergence { estimate: f64::NAN, change: f64::NAN, levels: MEIXNER_MAX_TERMS })
}

/// Numerical controls for the orthogonality checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub de: DeConfig,
    /// Relative tail bound for truncated infinite sums.
    pub tail_tol: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self { de: DeConfig::with_tol(1e-10), tail_tol: 1e-14 }
    }
}

/// The orthogonality measure in the purely continuous or purely discrete regime.
pub fn weight(params: &FamilyParams) -> Result<WeightSpec> {
    match *params {
        FamilyParams::MeixnerPollaczek { .. } => Ok(WeightSpec::Continuous { params: *params, support: Support::RealLine }),
        FamilyParams::ContinuousDualHahn { .. } | FamilyParams::Wilson { .. } => {
            check_continuous_regime(params)?;
            Ok(WeightSpec::Continuous { params: *params, support: Support::PositiveHalfLine })
        }
        FamilyParams::Meixner { mu, beta } => {
            let kmax = meixner_cutoff(mu, beta, 0, QuadSpec::default().tail_tol)?;
            let masses = (0..=kmax).map(|k| discrete_weight(params, k)).collect::<Result<Vec<_>>>()?;
            Ok(WeightSpec::Discrete { nodes: (0..=kmax).map(|k| k as f64).collect(), masses, truncated: true })
        }
        FamilyParams::Krawtchouk { n, .. } | FamilyParams::DualHahn { n, .. } | FamilyParams::Racah { n, .. } => {
            let masses = (0..=n).map(|k| discrete_weight(params, k)).collect::<Result<Vec<_>>>()?;
            Ok(WeightSpec::Discrete { nodes: (0..=n).map(|k| k as f64).collect(), masses, truncated: false })
        }
        FamilyParams::HPoly { .. } => Err(Error::UnsupportedFamily("H_n (weight unknown)")),
    }
}

fn continuous_pairing(params: &FamilyParams, n: usize, m: usize, de: DeConfig) -> Result<f64> {
    let (domain, to_arg): (Domain, fn(f64) -> f64) = match params {
        FamilyParams::MeixnerPollaczek { .. } => (Domain::WholeLine, |z| z),
        _ => (Domain::HalfLine(0.0), |z| z * z),
    };
    let top = n.max(m);
    let mut failure = None;
    let r = integrate_de(domain, de, |z, _, _| {
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
        let mut pn = 0.0;
        let mut pm = 0.0;
        forward(params, top, to_arg(z), |k, v| {
            if k == n {
                pn = v;
            }
            if k == m {
                pm = v;
            }
        });
        w * pn * pm
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r?.value)
}

fn discrete_sum(params: &FamilyParams, n: usize, m: usize, spec: &QuadSpec) -> Result<f64> {
    let kmax = match *params {
        FamilyParams::Meixner { mu, beta } => meixner_cutoff(mu, beta, n.max(m), spec.tail_tol)?,
        _ => params.finite_size().expect("finite family"),
    };
    let mut sum = 0.0;
    for k in 0..=kmax {
        let p = poly_sequence(params, n.max(m), k as f64)?;
        sum += discrete_weight(params, k)? * p[n] * p[m];
    }
    Ok(sum)
}

/// `|⟨P_n, P_m⟩ − δ_nm|` against the family's own measure.
pub fn orthogonality_defect(params: &FamilyParams, n: usize, m: usize, spec: &QuadSpec) -> Result<f64> {
    params.check_degree(n.max(m))?;
    let delta = if n == m { 1.0 } else { 0.0 };
    let pairing = match params {
        FamilyParams::MeixnerPollaczek { .. } | FamilyParams::ContinuousDualHahn { .. } | FamilyParams::Wilson { .. } => {
            check_continuous_regime(params)?;
            continuous_pairing(params, n, m, spec.de)?
        }
        FamilyParams::HPoly { .. } => return Err(Error::UnsupportedFamily("H_n (weight unknown)")),
        _ => discrete_sum(params, n, m, spec)?,
    };
    Ok((pairing - delta).abs())
}

/// Dual orthogonality of the discrete families, reported as
/// `|√(ω_n ω_m) Σ_k P_k(n) P_k(m) − δ_nm|`.
pub fn dual_orthogonality_defect(params: &FamilyParams, n: usize, m: usize, spec: &QuadSpec) -> Result<f64> {
    let delta = if n == m { 1.0 } else { 0.0 };
    let kmax = match *params {
        FamilyParams::Meixner { mu, beta } => meixner_cutoff(mu, beta, n.max(m), spec.tail_tol)?,
        FamilyParams::Krawtchouk { n: size, .. } | FamilyParams::DualHahn { n: size, .. } => {
            params.check_degree(n.max(m))?;
            size
        }
        _ => return Err(Error::UnsupportedFamily("dual orthogonality (Meixner, Krawtchouk, dual Hahn only)")),
    };
    // closed forms: the sum over the degree at a fixed node runs along a
    // decaying solution, which forward recursion would not resolve
    let mut sum = 0.0;
    for k in 0..=kmax {
        sum += poly_eval_closed(params, k, n as f64)? * poly_eval_closed(params, k, m as f64)?;
    }
    let scale = (discrete_weight(params, n)? * discrete_weight(params, m)?).sqrt();
    Ok((scale * sum - delta).abs())
}

/// Discrete part of the mixed measure for `μ < 0`: points `z_k² = −(k+μ)²`,
/// `k = 0..=⌊−μ⌋`, with the signed masses that enter the generalized relation
/// as `∫ρ P_n P_m dz + Σ_k mass_k P_n(z_k²) P_m(z_k²) = δ_nm`.
pub fn mixed_masses(params: &FamilyParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let mu = match *params {
        FamilyParams::ContinuousDualHahn { mu, .. } | FamilyParams::Wilson { mu, .. } => mu,
        _ => return Err(Error::UnsupportedFamily("mixed measure (continuous dual Hahn, Wilson only)")),
    };
    if mu >= 0.0 {
        return Err(Error::Regime(format!("mixed measure needs mu < 0 (mu = {mu})")));
    }
    let top = (-mu).floor() as usize;
    let lg = |z: Complex64| log_gamma_complex(z);
    let p = |a: Complex64, k: usize| pochhammer(a, k);
    let mut nodes = Vec::with_capacity(top + 1);
    let mut masses = Vec::with_capacity(top + 1);
    match *params {
        FamilyParams::ContinuousDualHahn { mu, a, b } => {
            let lead = (lg(a - mu)? + lg(b - mu)? - lg(a + b)? - lg(cx(1.0 - 2.0 * mu))?).exp().re;
            for k in 0..=top {
                let kf = k as f64;
                let ratio = p(mu + a, k) * p(mu + b, k) * p(cx(2.0 * mu), k) / (p(mu - a + 1.0, k) * p(mu - b + 1.0, k) * p(cx(1.0), k));
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                nodes.push(-(kf + mu) * (kf + mu));
                masses.push(-2.0 * lead * sign * (kf + mu) * ratio.re);
            }
        }
        FamilyParams::Wilson { mu, nu, a, b } => {
            let lead = (lg(mu + nu + a + b)? + lg(cx(nu - mu))? + lg(a - mu)? + lg(b - mu)?
                - lg(cx(1.0 - 2.0 * mu))?
                - lg(a + b)?
                - lg(a + nu)?
                - lg(b + nu)?)
            .exp()
            .re;
            for k in 0..=top {
                let kf = k as f64;
                let ratio = p(cx(2.0 * mu), k) * p(cx(mu + nu), k) * p(mu + a, k) * p(mu + b, k)
                    / (p(cx(mu - nu + 1.0), k) * p(mu - a + 1.0, k) * p(mu - b + 1.0, k) * p(cx(1.0), k));
                nodes.push(-(kf + mu) * (kf + mu));
                masses.push(-2.0 * lead * (kf + mu) * ratio.re);
            }
        }
        _ => unreachable!(),
    }
    Ok((nodes, masses))
}

/// Defect of the two-part (integral plus discrete sum) relation for `μ < 0`.
pub fn generalized_orthogonality_defect(params: &FamilyParams, n: usize, m: usize, spec: &QuadSpec) -> Result<f64> {
    let (nodes, masses) = mixed_masses(params)?;
    // sum in a fixed order so that defect(n, m) == defect(m, n) bit for bit
    let (lo, hi) = (n.min(m), n.max(m));
    let integral = continuous_pairing(params, lo, hi, spec.de)?;
    let mut discrete = 0.0;
    for (&x, &w) in nodes.iter().zip(&masses) {
        let p = poly_sequence(params, hi, x)?;
        discrete += w * p[lo] * p[hi];
    }
    let delta = if n == m { 1.0 } else { 0.0 };
    Ok((integral + discrete - delta).abs())
}

/// `H_n(z)` by forward recursion from `H₀ = 1`, `H₋₁ = 0`.
pub fn h_poly_eval(params: &FamilyParams, n: usize, z: f64) -> Result<f64> {
    match params {
        FamilyParams::HPoly { .. } => {
            params.validate()?;
            poly_eval_recursion(params, n, z)
        }
        _ => Err(Error::UnsupportedFamily("h_poly_eval expects H_n parameters")),
    }
}
