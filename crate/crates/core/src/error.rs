use thiserror::Error;

/// Errors raised by the numerical kernels and the physics layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma pole at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("zero denominator in hypergeometric term {term}: lower parameter {index} vanishes")]
    ZeroDenominator { term: usize, index: usize },

    #[error("series does not terminate: no upper parameter equals -{0}")]
    NotTerminating(usize),

    #[error("termination index {index} exceeds the degree cap {cap}")]
    DegreeCap { index: usize, cap: usize },

    #[error("parameter out of range: {0}")]
    ParameterRange(String),

    #[error("degree {degree} out of range for a finite family of size N = {size}")]
    DegreeOutOfRange { degree: usize, size: usize },

    #[error("operation not supported for {0}")]
    UnsupportedFamily(&'static str),

    #[error("wrong regime: {0}")]
    Regime(String),

    #[error("quadrature did not converge: estimate {estimate:e}, last change {change:e} after {levels} levels")]
    QuadratureNonConvergence { estimate: f64, change: f64, levels: usize },

    #[error("eigensolver failed: {0}")]
    EigenFailure(String),

    #[error("ill-conditioned fit: {0}")]
    IllConditionedFit(String),

    #[error("route {route} is not valid for the {model} potential")]
    InvalidRoute { model: &'static str, route: &'static str },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("no bound states: {0}")]
    NoBoundStates(String),
}

pub type Result<T> = std::result::Result<T, Error>;
