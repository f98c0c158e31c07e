//! Shared inputs for the benchmarks.

use num_complex::Complex64;
use tra_core::physics::{PotentialModel, Route};
use tra_core::polyfam::FamilyParams;

/// One parameter set per continuous family.
pub fn continuous_families() -> Vec<FamilyParams> {
    let c = |x| Complex64::new(x, 0.0);
    vec![
        FamilyParams::meixner_pollaczek(1.0, 1.2).expect("valid"),
        FamilyParams::continuous_dual_hahn(1.0, c(0.7), c(1.1)).expect("valid"),
        FamilyParams::wilson(0.7, 1.2, c(0.5), c(0.9)).expect("valid"),
    ]
}

/// A finite family large enough to exercise the two-sided node recursion.
pub fn racah() -> FamilyParams {
    FamilyParams::racah(20, 0.9, 0.4, 30.5).expect("valid")
}

pub fn coulomb() -> (PotentialModel, Route) {
    (PotentialModel::Coulomb { charge: -1.0, ell: 0, lambda: 1.0, nu: None }, Route::Mp)
}

pub fn poschl_teller() -> (PotentialModel, Route) {
    (PotentialModel::PoschlTeller { v0: -12.0, v1: 0.3, lambda: 1.0, a: None }, Route::Wilson)
}
