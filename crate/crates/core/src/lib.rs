//! Orthogonal-polynomial formulation of quantum mechanics.
//!
//! Wavefunctions are expanded in a square-integrable basis whose expansion
//! coefficients are orthogonal polynomials in the energy. Spectra come from the
//! zeros of the asymptotic scattering amplitude, phase shifts from its phase.

pub mod asymptotics;
pub mod ddouble;
pub mod error;
pub mod physics;
pub mod polyfam;
pub mod quadrature;
pub mod spectra;
pub mod specfun;
pub mod tridiag;

pub use error::{Error, Result};
