//! Numerical integration.
//!
//! Double-exponential rules (tanh-sinh, exp-sinh, sinh-sinh) with level-by-level
//! step halving, plus classical Gauss rules built from their Jacobi matrices.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::ln_gamma_real;
use crate::tridiag::SymTridiagonal;

/// Integration domain for the double-exponential integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    /// `[a, ∞)`
    HalfLine(f64),
    /// `(−∞, ∞)`
    WholeLine,
}

/// Convergence controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeConfig {
    /// Relative agreement between successive levels, measured against `∫|f|`.
    pub tol: f64,
    pub max_levels: usize,
    /// Half-width of the truncated `t` interval; `None` picks a per-domain default.
    pub t_max: Option<f64>,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self { tol: 1e-9, max_levels: 12, t_max: None }
    }
}

impl DeConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeResult {
    pub value: f64,
    /// `∫|f|` on the final level.
    pub l1: f64,
    /// Change between the last two levels.
    pub change: f64,
    pub levels: usize,
    pub evaluations: usize,
}

// abscissa, weight, distance to left end, distance to right end
fn node(domain: Domain, t: f64) -> (f64, f64, f64, f64) {
    let u = FRAC_PI_2 * t.sinh();
    let du = FRAC_PI_2 * t.cosh();
    match domain {
        Domain::Finite(a, b) => {
            let half = 0.5 * (b - a);
            let ch = u.cosh();
            // 1 - tanh(u) and 1 + tanh(u) without cancellation
            let e = (-2.0 * u.abs()).exp();
            let small = 2.0 * e / (1.0 + e);
            let (dl, dr) = if u >= 0.0 { (2.0 - small, small) } else { (small, 2.0 - small) };
            let x = a + half * dl;
            (x, half * du / (ch * ch), half * dl, half * dr)
        }
        Domain::HalfLine(a) => {
            let ex = u.exp();
            (a + ex, ex * du, ex, f64::INFINITY)
        }
        Domain::WholeLine => (u.sinh(), u.cosh() * du, f64::INFINITY, f64::INFINITY),
    }
}

/// Integrate `f(x, x − a, b − x)` over `domain`.
///
/// The endpoint distances are accurate even where `x` itself rounds onto the
/// endpoint, so algebraic endpoint singularities can be written in terms of them.
pub fn integrate_de<F>(domain: Domain, cfg: DeConfig, mut f: F) -> Result<DeResult>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    let mut evaluations = 0usize;
    let mut eval = |t: f64, evaluations: &mut usize| -> Result<(f64, f64)> {
        let (x, w, dl, dr) = node(domain, t);
        if w == 0.0 || !x.is_finite() || dl == 0.0 || dr == 0.0 {
            return Ok((0.0, 0.0));
        }
        *evaluations += 1;
        let v = f(x, dl, dr);
        if !v.is_finite() {
            return Err(Error::Domain(format!("integrand not finite at x = {x:e}")));
        }
        Ok((w * v, (w * v).abs()))
    };

    // Finite intervals go out until the endpoint distances underflow; the
    // infinite ones stop before abscissae overflow typical integrands.
    let t_max = cfg.t_max.unwrap_or(match domain {
        Domain::Finite(..) => 6.5,
        Domain::HalfLine(_) => 5.0,
        Domain::WholeLine => 4.5,
    });
    let mut h = 1.0;
    let (mut sum, mut abs_sum) = (0.0, 0.0);
    let kmax = (t_max / h).floor() as i64;
    for k in -kmax..=kmax {
        let (v, a) = eval(k as f64 * h, &mut evaluations)?;
        sum += v;
        abs_sum += a;
    }
    let mut estimate = sum * h;
    let mut change = f64::INFINITY;
    for level in 1..=cfg.max_levels {
        h *= 0.5;
        let kmax = (t_max / h).floor() as i64;
        let mut k = -kmax;
        if k % 2 == 0 {
            k += 1;
        }
        while k <= kmax {
            let (v, a) = eval(k as f64 * h, &mut evaluations)?;
            sum += v;
            abs_sum += a;
            k += 2;
        }
        let next = sum * h;
        change = (next - estimate).abs();
        estimate = next;
        let l1 = abs_sum * h;
        if level >= 3 && change <= cfg.tol * l1.max(f64::MIN_POSITIVE) {
            return Ok(DeResult { value: estimate, l1, change, levels: level, evaluations });
        }
    }
    Err(Error::QuadratureNonConvergence { estimate, change, levels: cfg.max_levels })
}

/// Vector-valued version of [`integrate_de`]: `f(x, x − a, b − x, out)` adds its
/// components into `out` (zeroed before each call).
///
/// Converges when every component changes by at most `tol` times the largest
/// component `L1` norm, so small entries are judged against the biggest ones.
pub fn integrate_de_vec<F>(domain: Domain, cfg: DeConfig, dim: usize, mut f: F) -> Result<Vec<f64>>
where
    F: FnMut(f64, f64, f64, &mut [f64]),
{
    let t_max = cfg.t_max.unwrap_or(match domain {
        Domain::Finite(..) => 6.5,
        Domain::HalfLine(_) => 5.0,
        Domain::WholeLine => 4.5,
    });
    let mut sum = vec![0.0; dim];
    let mut abs_sum = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    let mut add = |t: f64, sum: &mut [f64], abs_sum: &mut [f64]| -> Result<()> {
        let (x, w, dl, dr) = node(domain, t);
        if w == 0.0 || !x.is_finite() || dl == 0.0 || dr == 0.0 {
            return Ok(());
        }
        buf.iter_mut().for_each(|b| *b = 0.0);
        f(x, dl, dr, &mut buf);
        for ((s, a), &v) in sum.iter_mut().zip(abs_sum.iter_mut()).zip(&buf) {
            if !v.is_finite() {
                return Err(Error::Domain(format!("integrand not finite at x = {x:e}")));
            }
            *s += w * v;
            *a += (w * v).abs();
        }
        Ok(())
    };
    let mut h = 1.0;
    let kmax = (t_max / h).floor() as i64;
    for k in -kmax..=kmax {
        add(k as f64 * h, &mut sum, &mut abs_sum)?;
    }
    let mut estimate: Vec<f64> = sum.iter().map(|s| s * h).collect();
    let mut change = f64::INFINITY;
    for level in 1..=cfg.max_levels {
        h *= 0.5;
        let kmax = (t_max / h).floor() as i64;
        let mut k = -kmax;
        if k % 2 == 0 {
            k += 1;
        }
        while k <= kmax {
            add(k as f64 * h, &mut sum, &mut abs_sum)?;
            k += 2;
        }
        let next: Vec<f64> = sum.iter().map(|s| s * h).collect();
        change = next.iter().zip(&estimate).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        estimate = next;
        let scale = abs_sum.iter().fold(0.0_f64, |m, a| m.max(a * h));
        if level >= 3 && change <= cfg.tol * scale.max(f64::MIN_POSITIVE) {
            return Ok(estimate);
        }
    }
    Err(Error::QuadratureNonConvergence { estimate: estimate.first().copied().unwrap_or(0.0), change, levels: cfg.max_levels })
}

/// Nodes and normalized weights of a quadrature rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    /// Golub–Welsch: nodes are the eigenvalues, weights the squared first components.
    pub fn from_jacobi_matrix(jm: &SymTridiagonal) -> Result<Self> {
        let (nodes, first) = jm.eigen_first_components()?;
        let weights = first.iter().map(|v| v * v).collect();
        Ok(Self { nodes, weights, order: jm.dim() })
    }

    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss rule for `y^α e^{−y}` on `(0, ∞)`, weights scaled to total mass 1.
pub fn gauss_laguerre(order: usize, alpha: f64) -> Result<QuadratureRule> {
    let diag = (0..order).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let off = (1..order).map(|k| (k as f64 * (k as f64 + alpha)).sqrt()).collect();
    QuadratureRule::from_jacobi_matrix(&SymTridiagonal::new(diag, off))
}

/// Total mass `Γ(α+1)` of the Laguerre weight, in log form.
pub fn laguerre_log_mass(alpha: f64) -> Result<f64> {
    ln_gamma_real(alpha + 1.0)
}

/// Gauss rule for `(1−y)^a (1+y)^b` on `(−1, 1)`, weights scaled to total mass 1.
pub fn gauss_jacobi(order: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    let s = a + b;
    let diag = (0..order)
        .map(|k| {
            let k = k as f64;
            if k == 0.0 {
                (b - a) / (s + 2.0)
            } else {
                (b * b - a * a) / ((2.0 * k + s) * (2.0 * k + s + 2.0))
            }
        })
        .collect();
    let off = (1..order)
        .map(|k| {
            let k = k as f64;
            let t = 2.0 * k + s;
            if k == 1.0 {
                (4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + s) * (2.0 + s) * (3.0 + s))).sqrt()
            } else {
                (4.0 * k * (k + a) * (k + b) * (k + s) / (t * t * (t + 1.0) * (t - 1.0))).sqrt()
            }
        })
        .collect();
    QuadratureRule::from_jacobi_matrix(&SymTridiagonal::new(diag, off))
}

/// Total mass of the Jacobi weight, in log form.
pub fn jacobi_log_mass(a: f64, b: f64) -> Result<f64> {
    Ok((a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma_real(a + 1.0)? + ln_gamma_real(b + 1.0)?
        - ln_gamma_real(a + b + 2.0)?)
}
