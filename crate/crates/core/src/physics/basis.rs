//! Square-integrable bases, matrix assembly and the Rayleigh–Ritz oracle.
//!
//! Every basis is written in a coordinate `y(x)` as a prefactor times a classical
//! polynomial in `y`. Matrix elements are integrated in `y` with
//! `dx = dy / y′(y)`, and the kinetic term is used in its symmetric form
//! `½ ∫ φ_m′ φ_n′ dx`.

use std::f64::consts::{LN_2, PI, SQRT_2};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_de_vec, DeConfig, Domain};
use crate::specfun::ln_gamma_real;

const RESCALE_ABOVE: f64 = 1e150;
const LN_UNDERFLOW: f64 = -745.0;

/// The coordinate transformation `y(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum Coordinate {
    /// `y = λr`, `r ≥ 0`
    Linear { scale: f64 },
    /// `y = (λr)²`, `r ≥ 0`
    Quadratic { scale: f64 },
    /// `y = e^{αx}`, `x ∈ ℝ`
    Exponential { scale: f64 },
    /// `y = sin(λx)`, `|x| ≤ π/2λ`
    Sine { scale: f64 },
    /// `y = 2(x/L)² − 1`, `0 ≤ x ≤ L`
    QuadraticInterval { length: f64 },
    /// `y = 1 − 2e^{−λx}`, `x ≥ 0`
    ExpInterval { scale: f64 },
    /// `y = 2tanh²(λx) − 1`, `x ≥ 0`
    TanhSquared { scale: f64 },
    /// `y = tanh(λx)`, `x ∈ ℝ`
    Tanh { scale: f64 },
    /// `y = 2sin²(πx/L) − 1`, `0 ≤ x ≤ L/2`
    SineSquared { length: f64 },
    /// `y = cosh(λx)`, `x ≥ 0`
    Cosh { scale: f64 },
}

/// Distances of `y` from the special points, accurate near the endpoints.
#[derive(Debug, Clone, Copy)]
pub struct YPoint {
    pub y: f64,
    /// `|1 − y|` for the Jacobi-type maps, unused otherwise.
    pub one_minus: f64,
    /// `1 + y`
    pub one_plus: f64,
}

impl YPoint {
    fn laguerre(y: f64) -> Self {
        Self { y, one_minus: (1.0 - y).abs(), one_plus: 1.0 + y }
    }
}

impl Coordinate {
    /// Integration domain in `y`.
    pub fn y_domain(&self) -> Domain {
        match self {
            Coordinate::Linear { .. } | Coordinate::Quadratic { .. } | Coordinate::Exponential { .. } => Domain::HalfLine(0.0),
            Coordinate::Cosh { .. } => Domain::HalfLine(1.0),
            _ => Domain::Finite(-1.0, 1.0),
        }
    }

    pub fn is_laguerre_type(&self) -> bool {
        matches!(self, Coordinate::Linear { .. } | Coordinate::Quadratic { .. } | Coordinate::Exponential { .. })
    }

    /// Range of the physical coordinate.
    pub fn x_range(&self) -> (f64, f64) {
        match *self {
            Coordinate::Linear { .. } | Coordinate::Quadratic { .. } => (0.0, f64::INFINITY),
            Coordinate::Exponential { .. } | Coordinate::Tanh { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Coordinate::Sine { scale } => (-0.5 * PI / scale, 0.5 * PI / scale),
            Coordinate::QuadraticInterval { length } => (0.0, length),
            Coordinate::SineSquared { length } => (0.0, 0.5 * length),
            Coordinate::ExpInterval { .. } | Coordinate::TanhSquared { .. } | Coordinate::Cosh { .. } => (0.0, f64::INFINITY),
        }
    }

    fn point(&self, y: f64, dl: f64, dr: f64) -> YPoint {
        match self.y_domain() {
            Domain::Finite(..) => YPoint { y, one_minus: dr, one_plus: dl },
            Domain::HalfLine(1.0) => YPoint { y, one_minus: dl, one_plus: 2.0 + dl },
            _ => YPoint::laguerre(dl),
        }
    }

    /// `y(x)` with its endpoint distances.
    pub fn at_x(&self, x: f64) -> Result<YPoint> {
        let (lo, hi) = self.x_range();
        if !(x >= lo && x <= hi) {
            return Err(Error::Domain(format!("x = {x} outside [{lo}, {hi}]")));
        }
        Ok(match *self {
            Coordinate::Linear { scale } => YPoint::laguerre(scale * x),
            Coordinate::Quadratic { scale } => YPoint::laguerre((scale * x).powi(2)),
            Coordinate::Exponential { scale } => YPoint::laguerre((scale * x).exp()),
            Coordinate::Sine { scale } => {
                let s = (scale * x).sin();
                // 1 ∓ sin t = 2 sin²(π/4 ∓ t/2)
                let t = scale * x;
                YPoint { y: s, one_minus: 2.0 * (0.25 * PI - 0.5 * t).sin().powi(2), one_plus: 2.0 * (0.25 * PI + 0.5 * t).sin().powi(2) }
            }
            Coordinate::QuadraticInterval { length } => {
                let u = x / length;
                YPoint { y: 2.0 * u * u - 1.0, one_minus: 2.0 * (1.0 - u) * (1.0 + u), one_plus: 2.0 * u * u }
            }
            Coordinate::ExpInterval { scale } => {
                let e = (-scale * x).exp();
                YPoint { y: 1.0 - 2.0 * e, one_minus: 2.0 * e, one_plus: -2.0 * (-scale * x).exp_m1() }
            }
            Coordinate::TanhSquared { scale } => {
                let t = (scale * x).tanh();
                let c = (scale * x).cosh();
                YPoint { y: 2.0 * t * t - 1.0, one_minus: 2.0 / (c * c), one_plus: 2.0 * t * t }
            }
            Coordinate::Tanh { scale } => {
                // 1 ∓ tanh t = 2 / (1 + e^{±2t})
                let t = scale * x;
                YPoint { y: t.tanh(), one_minus: 2.0 / (1.0 + (2.0 * t).exp()), one_plus: 2.0 / (1.0 + (-2.0 * t).exp()) }
            }
            Coordinate::SineSquared { length } => {
                let t = PI * x / length;
                YPoint { y: -(2.0 * t).cos(), one_minus: 2.0 * t.cos().powi(2), one_plus: 2.0 * t.sin().powi(2) }
            }
            Coordinate::Cosh { scale } => {
                let t = scale * x;
                let s = (0.5 * t).sinh();
                YPoint { y: t.cosh(), one_minus: 2.0 * s * s, one_plus: 2.0 + 2.0 * s * s }
            }
        })
    }

    /// `dy/dx` expressed through `y`.
    pub fn jacobian(&self, p: &YPoint) -> f64 {
        match *self {
            Coordinate::Linear { scale } => scale,
            Coordinate::Quadratic { scale } => 2.0 * scale * p.y.sqrt(),
            Coordinate::Exponential { scale } => scale * p.y,
            Coordinate::Sine { scale } => scale * (p.one_minus * p.one_plus).sqrt(),
            Coordinate::QuadraticInterval { length } => 2.0 * SQRT_2 / length * p.one_plus.sqrt(),
            Coordinate::ExpInterval { scale } => scale * p.one_minus,
            Coordinate::TanhSquared { scale } => scale * SQRT_2 * p.one_minus * p.one_plus.sqrt(),
            Coordinate::Tanh { scale } => scale * p.one_minus * p.one_plus,
            Coordinate::SineSquared { length } => 2.0 * PI / length * (p.one_minus * p.one_plus).sqrt(),
            Coordinate::Cosh { scale } => scale * (p.one_minus * p.one_plus).sqrt(),
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Coordinate::Linear { scale } => format!("y = {scale} r"),
            Coordinate::Quadratic { scale } => format!("y = ({scale} r)^2"),
            Coordinate::Exponential { scale } => format!("y = exp({scale} x)"),
            Coordinate::Sine { scale } => format!("y = sin({scale} x)"),
            Coordinate::QuadraticInterval { length } => format!("y = 2 (x/{length})^2 - 1"),
            Coordinate::ExpInterval { scale } => format!("y = 1 - 2 exp(-{scale} x)"),
            Coordinate::TanhSquared { scale } => format!("y = 2 tanh^2({scale} x) - 1"),
            Coordinate::Tanh { scale } => format!("y = tanh({scale} x)"),
            Coordinate::SineSquared { length } => format!("y = 2 sin^2(pi x/{length}) - 1"),
            Coordinate::Cosh { scale } => format!("y = cosh({scale} x)"),
        }
    }
}

/// Prefactor and polynomial of a basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisShape {
    /// `φ_n = y^p e^{−y/2} √(n!/Γ(n+ν+1)) L_n^ν(y)`
    Laguerre { power: f64, nu: f64 },
    /// `φ_n = A_n |1−y|^α (1+y)^β P_n^{(σ,τ)}(y)`, `A_n` orthonormalizing
    /// `P_n^{(σ,τ)}` on `[−1, 1]` when `σ, τ > −1` and `1` otherwise.
    Jacobi { alpha: f64, beta: f64, sigma: f64, tau: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub coordinate: Coordinate,
    pub shape: BasisShape,
}

/// Values and `y`-derivatives of `φ_0 … φ_{M−1}` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisValues {
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

// P_{n+1} = (a_n y + b_n) P_n − c_n P_{n−1}
trait Recurrence {
    fn step(&self, n: usize) -> (f64, f64, f64);
    fn p0(&self) -> f64;
    /// `ln` of the factor applied to the classical `P_n`.
    fn ln_norm(&self, n: usize) -> f64;
}

struct LaguerreRec {
    nu: f64,
    ln_norm: f64,
}

impl Recurrence for LaguerreRec {
    fn step(&self, n: usize) -> (f64, f64, f64) {
        let n = n as f64;
        let d = ((n + 1.0) * (n + self.nu + 1.0)).sqrt();
        let c = if n == 0.0 { 0.0 } else { (n * (n + self.nu)).sqrt() / d };
        (-1.0 / d, (2.0 * n + self.nu + 1.0) / d, c)
    }
    fn p0(&self) -> f64 {
        1.0
    }
    fn ln_norm(&self, _: usize) -> f64 {
        self.ln_norm
    }
}

struct JacobiRec {
    sigma: f64,
    tau: f64,
    /// `ln(1/√h_n)` for each degree when normalizable.
    norms: Option<Vec<f64>>,
}

impl JacobiRec {
    fn new(sigma: f64, tau: f64, m: usize) -> Result<Self> {
        let s = sigma + tau;
        for n in 1..m {
            let nf = n as f64;
            if (2.0 * nf + s).abs() < 1e-12 || (nf + s).abs() < 1e-12 {
                return Err(Error::ParameterRange(format!("Jacobi recursion degenerate at n = {n} for sigma + tau = {s}")));
            }
        }
        let norms = if sigma > -1.0 && tau > -1.0 {
            let mut v = Vec::with_capacity(m);
            for n in 0..m {
                let nf = n as f64;
                let ln_h = if n == 0 {
                    (s + 1.0) * LN_2 + ln_gamma_real(sigma + 1.0)? + ln_gamma_real(tau + 1.0)? - ln_gamma_real(s + 2.0)?
                } else {
                    (s + 1.0) * LN_2 - (2.0 * nf + s + 1.0).ln() + ln_gamma_real(nf + sigma + 1.0)? + ln_gamma_real(nf + tau + 1.0)?
                        - ln_gamma_real(nf + s + 1.0)?
                        - ln_gamma_real(nf + 1.0)?
                };
                v.push(-0.5 * ln_h);
            }
            Some(v)
        } else {
            None
        };
        Ok(Self { sigma, tau, norms })
    }
}

impl Recurrence for JacobiRec {
    fn step(&self, n: usize) -> (f64, f64, f64) {
        let (a, b) = (self.sigma, self.tau);
        let s = a + b;
        if n == 0 {
            // P_1 = (σ+1) + (s+2)(y−1)/2
            return (0.5 * (s + 2.0), 0.5 * (a - b), 0.0);
        }
        let n = n as f64;
        let t = 2.0 * n + s;
        let den = 2.0 * (n + 1.0) * (n + s + 1.0) * t;
        ((t + 1.0) * (t + 2.0) * t / den, (t + 1.0) * (a * a - b * b) / den, 2.0 * (n + a) * (n + b) * (t + 2.0) / den)
    }
    fn p0(&self) -> f64 {
        1.0
    }
    fn ln_norm(&self, n: usize) -> f64 {
        self.norms.as_ref().map_or(0.0, |v| v[n])
    }
}

// Polynomial values and derivatives, each with its own log scale.
fn run_recurrence(rec: &dyn Recurrence, m: usize, y: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut p = Vec::with_capacity(m);
    let mut d = Vec::with_capacity(m);
    let mut scale = Vec::with_capacity(m);
    let (mut p_prev, mut p_cur) = (0.0, rec.p0());
    let (mut d_prev, mut d_cur) = (0.0, 0.0);
    let mut ln_s = 0.0;
    for n in 0..m {
        p.push(p_cur);
        d.push(d_cur);
        scale.push(ln_s);
        if n + 1 == m {
            break;
        }
        let (a, b, c) = rec.step(n);
        let p_next = (a * y + b) * p_cur - c * p_prev;
        let d_next = (a * y + b) * d_cur + a * p_cur - c * d_prev;
        p_prev = p_cur;
        p_cur = p_next;
        d_prev = d_cur;
        d_cur = d_next;
        let big = p_cur.abs().max(d_cur.abs());
        if big > RESCALE_ABOVE {
            let f = 1.0 / big;
            p_cur *= f;
            p_prev *= f;
            d_cur *= f;
            d_prev *= f;
            ln_s -= f.ln();
        }
    }
    (p, d, scale)
}

impl BasisSpec {
    pub fn laguerre(coordinate: Coordinate, power: f64, nu: f64) -> Self {
        Self { coordinate, shape: BasisShape::Laguerre { power, nu } }
    }

    pub fn jacobi(coordinate: Coordinate, alpha: f64, beta: f64, sigma: f64, tau: f64) -> Self {
        Self { coordinate, shape: BasisShape::Jacobi { alpha, beta, sigma, tau } }
    }

    /// The same basis with the leading prefactor exponent shifted; used as a
    /// negative control for the tridiagonality audit.
    pub fn perturbed(&self, shift: f64) -> Self {
        let shape = match self.shape {
            BasisShape::Laguerre { power, nu } => BasisShape::Laguerre { power: power + shift, nu },
            BasisShape::Jacobi { alpha, beta, sigma, tau } => BasisShape::Jacobi { alpha: alpha + shift, beta, sigma, tau },
        };
        Self { coordinate: self.coordinate, shape }
    }

    pub fn validate(&self) -> Result<()> {
        let laguerre = self.coordinate.is_laguerre_type();
        match self.shape {
            BasisShape::Laguerre { power, nu } if laguerre => {
                if !(nu > -1.0) || !(power > 0.0) {
                    return Err(Error::ParameterRange(format!("Laguerre basis needs nu > -1 and power > 0 (nu = {nu}, power = {power})")));
                }
            }
            BasisShape::Jacobi { alpha, .. } if !laguerre => {
                if !(alpha > 0.0) {
                    return Err(Error::ParameterRange(format!("Jacobi basis needs alpha > 0, got {alpha}")));
                }
            }
            _ => return Err(Error::ParameterRange("basis shape does not match the coordinate".into())),
        }
        Ok(())
    }

    /// `φ_n` and `dφ_n/dy` for `n < m`.
    pub fn values_at(&self, p: &YPoint, m: usize) -> Result<BasisValues> {
        let mut values = vec![0.0; m];
        let mut derivatives = vec![0.0; m];
        // d ln(prefactor)/dy = c₀ + Σ cᵢ/dᵢ; the cᵢ/dᵢ terms are applied in log space
        // because dᵢ can be as small as the smallest normal number
        let (ln_pref, c0, poles, rec): (f64, f64, [(f64, f64); 2], Box<dyn Recurrence>) = match self.shape {
            BasisShape::Laguerre { power, nu } => {
                let y = p.y;
                let ln_y = y.ln();
                (power * ln_y - 0.5 * y, -0.5, [(power, ln_y), (0.0, 0.0)], Box::new(LaguerreRec { nu, ln_norm: -0.5 * ln_gamma_real(nu + 1.0)? }))
            }
            BasisShape::Jacobi { alpha, beta, sigma, tau } => {
                let (ln_u, ln_v) = (p.one_minus.ln(), p.one_plus.ln());
                // d/dy |1−y|^α changes sign across y = 1
                let side = if matches!(self.coordinate, Coordinate::Cosh { .. }) { 1.0 } else { -1.0 };
                (alpha * ln_u + beta * ln_v, 0.0, [(side * alpha, ln_u), (beta, ln_v)], Box::new(JacobiRec::new(sigma, tau, m)?))
            }
        };
        let (pv, dv, sc) = run_recurrence(rec.as_ref(), m, p.y);
        for n in 0..m {
            let ln_f = ln_pref + sc[n] + rec.ln_norm(n);
            let pole_part: f64 = poles.iter().filter(|(c, _)| *c != 0.0).map(|&(c, ln_d)| c * (ln_f - ln_d).exp()).sum();
            if ln_f < LN_UNDERFLOW && pole_part == 0.0 {
                continue;
            }
            let f = ln_f.exp();
            values[n] = f * pv[n];
            derivatives[n] = (f * c0 + pole_part) * pv[n] + f * dv[n];
        }
        Ok(BasisValues { values, derivatives })
    }

    /// `φ_n(x)` at a physical coordinate.
    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        let p = self.coordinate.at_x(x)?;
        if p.y == 0.0 || (!self.coordinate.is_laguerre_type() && (p.one_minus == 0.0 || p.one_plus == 0.0)) {
            return Ok(0.0);
        }
        Ok(self.values_at(&p, n + 1)?.values[n])
    }
}

/// Hamiltonian and overlap matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPair {
    pub h: DMatrix<f64>,
    pub s: DMatrix<f64>,
}

impl MatrixPair {
    /// `max |(H − ES)_{nm}|` over `|n − m| ≥ 2`, relative to the largest entry,
    /// after scaling rows and columns by `S_nn^{−1/2}`.
    pub fn tridiagonality_defect(&self, energy: f64) -> f64 {
        let m = self.h.nrows();
        let d: Vec<f64> = (0..m).map(|i| 1.0 / self.s[(i, i)].sqrt()).collect();
        let (mut band, mut off) = (0.0_f64, 0.0_f64);
        for i in 0..m {
            for j in 0..m {
                let v = ((self.h[(i, j)] - energy * self.s[(i, j)]) * d[i] * d[j]).abs();
                band = band.max(v);
                if i.abs_diff(j) >= 2 {
                    off = off.max(v);
                }
            }
        }
        if band == 0.0 {
            0.0
        } else {
            off / band
        }
    }
}

/// Assemble `H` and `S` for the potential `V(y)` by double-exponential quadrature in `y`.
pub fn assemble<V>(basis: &BasisSpec, m: usize, potential: V, tol: f64) -> Result<MatrixPair>
where
    V: Fn(&YPoint) -> f64,
{
    basis.validate()?;
    if m == 0 {
        return Err(Error::ParameterRange("matrix size must be positive".into()));
    }
    let packed = m * (m + 1) / 2;
    let coord = basis.coordinate;
    let mut failure = None;
    let sums = integrate_de_vec(coord.y_domain(), DeConfig { tol, max_levels: 12, t_max: None }, 2 * packed, |y, dl, dr, out| {
        let p = coord.point(y, dl, dr);
        let rho = coord.jacobian(&p);
        if !(rho > 0.0) || !rho.is_finite() {
            return;
        }
        let bv = match basis.values_at(&p, m) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                return;
            }
        };
        if bv.values.iter().all(|&v| v == 0.0) && bv.derivatives.iter().all(|&v| v == 0.0) {
            return;
        }
        let v = potential(&p);
        let (hs, ss) = out.split_at_mut(packed);
        let mut k = 0;
        for i in 0..m {
            let (fi, gi) = (bv.values[i], bv.derivatives[i]);
            for j in 0..=i {
                let fij = fi * bv.values[j] / rho;
                ss[k] = fij;
                // the potential may overflow at an endpoint node where the basis underflows
                hs[k] = 0.5 * rho * gi * bv.derivatives[j] + if fij == 0.0 { 0.0 } else { v * fij };
                k += 1;
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut h = DMatrix::zeros(m, m);
    let mut s = DMatrix::zeros(m, m);
    let mut k = 0;
    for i in 0..m {
        for j in 0..=i {
            h[(i, j)] = sums[k];
            h[(j, i)] = sums[k];
            s[(i, j)] = sums[packed + k];
            s[(j, i)] = sums[packed + k];
            k += 1;
        }
    }
    Ok(MatrixPair { h, s })
}

/// Eigenvalues (ascending) and `S`-normalized eigenvectors of `H c = E S c`.
pub fn generalized_eigen(pair: &MatrixPair) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let chol = pair.s.clone().cholesky().ok_or_else(|| Error::EigenFailure("overlap matrix is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l.clone().try_inverse().ok_or_else(|| Error::EigenFailure("singular Cholesky factor".into()))?;
    let c = &l_inv * &pair.h * l_inv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(c, f64::EPSILON, 10_000).ok_or_else(|| Error::EigenFailure("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = l_inv.transpose() * eig.eigenvectors;
    let sorted = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |r, c| vecs[(r, order[c])]);
    Ok((values, sorted))
}
