use tra_core::asymptotics::{closed_form_scattering, phase_distance};
use tra_core::physics::*;
use tra_core::polyfam::weight_density;
use tra_core::Error;

fn coulomb(z: f64, ell: u32) -> PotentialModel {
    PotentialModel::Coulomb { charge: z, ell, lambda: 1.0, nu: None }
}

fn oscillator(omega: f64, ell: u32) -> PotentialModel {
    PotentialModel::Oscillator { omega, ell, lambda: 1.0, nu: None }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn spectrum_examples() {
    let e = bound_spectrum(&coulomb(-1.0, 0), Route::Mp, 1).unwrap().values();
    assert_eq!(e, vec![-0.5, -0.125]);
    let o = bound_spectrum(&oscillator(1.0, 1), Route::Mp, 2).unwrap().values();
    assert!((o[2] - 6.5).abs() < 1e-12);
    let morse = PotentialModel::Morse { v0: 0.125, v1: -1.0, alpha: 1.0, nu: None };
    assert!((bound_spectrum(&morse, Route::Mp, 0).unwrap().values()[0] + 1.125).abs() < 1e-12);
    let log = bound_spectrum(&PotentialModel::LogSpectrum { mu: -3.0, lambda: 1.0 }, Route::Mp, 0).unwrap();
    assert_eq!(log.n_max, Some(1));
    assert!((log.values()[1] - 0.5 * 4f64.exp()).abs() < 1e-12 * 0.5 * 4f64.exp());
}

#[test]
fn mp_and_cdh_routes_agree_as_formulas() {
    for (z, ell) in [(-1.0, 0), (-2.5, 1), (-0.3, 3)] {
        let a = bound_spectrum(&coulomb(z, ell), Route::Mp, 6).unwrap().values();
        let b = bound_spectrum(&coulomb(z, ell), Route::Cdh, 6).unwrap().values();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs()));
    }
    for (omega, ell) in [(1.0, 0), (0.37, 2), (4.2, 5)] {
        let a = bound_spectrum(&oscillator(omega, ell), Route::Mp, 6).unwrap().values();
        let b = bound_spectrum(&oscillator(omega, ell), Route::Cdh, 6).unwrap().values();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs()));
    }
}

#[test]
fn morse_cdh_formula_is_the_mp_formula_at_v0_alpha2_over_8() {
    for (alpha, v) in [(1.0, -1.0), (0.7, -2.3), (1.9, -5.0), (0.4, -0.9)] {
        let model = PotentialModel::Morse { v0: alpha * alpha / 8.0, v1: v, alpha, nu: None };
        let a = bound_spectrum(&model, Route::Mp, 0).unwrap().values();
        let b = bound_spectrum(&model, Route::Cdh, 0).unwrap().values();
        assert_eq!(a.len(), b.len());
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs()), "{a:?} vs {b:?}");
    }
}

#[test]
fn bound_energies_sit_on_gamma_poles() {
    // the Meixner regime of the Coulomb map needs λ² < 8|E_k|
    let cases = [
        (PotentialModel::Coulomb { charge: -1.0, ell: 0, lambda: 0.3, nu: None }, Route::Mp),
        (coulomb(-1.0, 2), Route::Cdh),
        (oscillator(1.3, 1), Route::Mp),
        (oscillator(1.3, 0), Route::Cdh),
        (PotentialModel::Morse { v0: 0.5, v1: -4.0, alpha: 1.0, nu: None }, Route::Mp),
        (PotentialModel::PoschlTeller { v0: -12.0, v1: 0.3, lambda: 1.0, a: None }, Route::Wilson),
        (PotentialModel::RosenMorse { depth: 2.5, barrier: 4.0, lambda: 1.0, a: None }, Route::Wilson),
    ];
    for (model, route) in cases {
        let s = bound_spectrum(&model, route, 3).unwrap();
        for level in &s.energies {
            let map = map_to_polynomial(&model, route, level.value).unwrap();
            assert!(map.pole_residual(level.k) < 1e-12, "{} k={}: {}", model.name(), level.k, map.pole_residual(level.k));
        }
    }
}

#[test]
fn cdh_route_eigen_oracle() {
    let opts = MatrixOptions::default();
    for model in [coulomb(-1.0, 0), oscillator(1.0, 0), oscillator(0.6, 2)] {
        let r = eigen_oracle_spectrum(&model, Route::Cdh, 60, 3, opts).unwrap();
        for (a, b) in r.spectrum.values().iter().zip(r.closed_form.values()) {
            assert!(rel(*a, b) < 1e-6, "{}: {a} vs {b}", model.name());
        }
    }
}

#[test]
fn wilson_route_eigen_oracle() {
    let opts = MatrixOptions::default();
    let pt = PotentialModel::PoschlTeller { v0: -12.0, v1: 0.3, lambda: 1.0, a: None };
    let scarf = PotentialModel::TrigScarf { v0: 0.2, v_plus: 3.0, v_minus: 1.0, lambda: 1.0, a: None };
    let rm = PotentialModel::RosenMorse { depth: 2.5, barrier: 4.0, lambda: 1.0, a: None };
    for (model, tol) in [(pt, 1e-6), (scarf, 1e-5), (rm, 1e-10)] {
        let r = eigen_oracle_spectrum(&model, Route::Wilson, 60, 3, opts).unwrap();
        for (a, b) in r.spectrum.values().iter().zip(r.closed_form.values()) {
            assert!(rel(*a, b) < tol, "{}: {a} vs {b}", model.name());
        }
    }
}

#[test]
fn poschl_teller_counts_match_negative_eigenvalues() {
    let opts = MatrixOptions::default();
    for (v0, v1) in [(-12.0, 0.3), (-30.0, 1.5), (-6.0, -0.1)] {
        let model = PotentialModel::PoschlTeller { v0, v1, lambda: 1.0, a: None };
        let closed = bound_spectrum(&model, Route::Wilson, 0).unwrap();
        let pair = hamiltonian_matrix(&model, Some(Route::Wilson), 60, None, opts).unwrap();
        let (eig, _) = generalized_eigen(&pair).unwrap();
        let negative = eig.iter().filter(|&&e| e < 0.0).count();
        assert_eq!(negative, closed.energies.len(), "V0={v0} V1={v1}: {eig:?}");
    }
}

// The closed-form Eckart spectrum is kept as stated; the Rayleigh-Ritz oracle follows
// the Gamma-pole rule, whose shift is (mu+nu)/2 rather than (mu+nu+1)/2.
#[test]
fn eckart_oracle_follows_the_pole_rule() {
    let (v0, v1) = (-20.0, 0.5);
    let model = PotentialModel::Eckart { v0, v1, lambda: 1.0, a: None };
    let r = eigen_oracle_spectrum(&model, Route::Wilson, 60, 0, MatrixOptions::default()).unwrap();
    let (u0, u1) = (2.0 * v0, 2.0 * v1);
    let shift = 0.5 * (1.0 + (4.0 * u1 + 1.0).sqrt());
    let pole_rule = |k: f64| {
        let s = k + shift;
        0.5 * (-0.25 * (s - u0 / s).powi(2) - u0)
    };
    let e0 = r.spectrum.values()[0];
    assert!(rel(e0, pole_rule(0.0)) < 1e-4, "{e0} vs {}", pole_rule(0.0));
    assert!(rel(e0, r.closed_form.values()[0]) > 0.1);
}

#[test]
fn tridiagonal_bases_and_controls() {
    let opts = MatrixOptions::default();
    let audit = tridiagonality_audit(&coulomb(-1.0, 0), Some(Route::Mp), 30, Some(0.25), opts).unwrap();
    assert!(audit.defect <= 1e-8 && audit.control_defect.unwrap() >= 1e-2);
    let row5 = table1_samples().into_iter().find(|m| matches!(m, PotentialModel::Table1 { row: 5, .. })).unwrap();
    assert!(tridiagonality_defect(&row5, None, 20, opts).unwrap() <= 1e-7);
    assert_eq!(tridiagonality_defect(&coulomb(-1.0, 0), Some(Route::Mp), 1, opts).unwrap(), 0.0);
}

#[test]
fn oscillator_overlap_is_tridiagonal() {
    let pair = hamiltonian_matrix(&oscillator(1.0, 0), Some(Route::Mp), 12, None, MatrixOptions::default()).unwrap();
    let scale = pair.s.amax();
    for i in 0..12usize {
        for j in 0..12 {
            if i.abs_diff(j) >= 2 {
                assert!(pair.s[(i, j)].abs() <= 1e-10 * scale);
            }
        }
    }
}

#[test]
fn basis_functions_vanish_at_boundaries() {
    assert_eq!(basis_eval(&coulomb(-1.0, 0), Some(Route::Mp), 3, 0.0).unwrap(), 0.0);
    let pt = PotentialModel::PoschlTeller { v0: -12.0, v1: 0.3, lambda: 1.0, a: None };
    // y = 2 tanh²(λx) − 1 = −1 at x = 0
    assert_eq!(basis_eval(&pt, Some(Route::Wilson), 2, 0.0).unwrap(), 0.0);
    assert!(basis_eval(&pt, Some(Route::Wilson), 2, 40.0).unwrap().abs() < 1e-10);
    let phi0 = basis_eval(&coulomb(-1.0, 0), Some(Route::Mp), 0, 2.0).unwrap();
    assert!((phi0 - 2.0 * (-1.0f64).exp()).abs() < 1e-14);
}

#[test]
fn phase_shift_examples() {
    let d = phase_shift(&coulomb(-1.0, 0), 0.5).unwrap();
    assert!((d.phase.abs() - 0.301_640_320_467_533_2).abs() < 1e-12);
    assert!(phase_shift(&coulomb(-1e-14, 0), 0.5).unwrap().phase.abs() < 1e-12);
    let eckart = PotentialModel::Eckart { v0: -2.0, v1: 0.8, lambda: 1.1, a: None };
    for e in [0.2, 1.0, 3.5] {
        let direct = phase_shift(&eckart, e).unwrap();
        let map = map_to_polynomial(&eckart, Route::Wilson, e).unwrap();
        let via = closed_form_scattering(&map.family, map.z.re).unwrap();
        assert!(phase_distance(direct.phase, via.phase) < 1e-12);
    }
    assert!(matches!(phase_shift(&coulomb(-1.0, 0), 0.0), Err(Error::Domain(_))));
}

#[test]
fn wavefunction_truncation_behaviour() {
    let model = PotentialModel::Coulomb { charge: -1.0, ell: 0, lambda: 0.5, nu: None };
    let xs = [0.5, 1.0, 2.0];
    let e = 0.7;
    let one = reconstruct_wavefunction(&model, Route::Mp, EnergyLabel::Continuum(e), &xs, 1).unwrap();
    let map = map_to_polynomial(&model, Route::Mp, e).unwrap();
    let rho = weight_density(&map.family, map.argument).unwrap();
    for (x, v) in xs.iter().zip(&one.values) {
        let phi0 = basis_eval(&model, Some(Route::Mp), 0, *x).unwrap();
        assert!((v - rho.sqrt() * phi0).abs() < 1e-14);
    }
    let short = reconstruct_wavefunction(&model, Route::Mp, EnergyLabel::Bound(1), &xs, 20).unwrap();
    let long = reconstruct_wavefunction(&model, Route::Mp, EnergyLabel::Bound(1), &xs, 40).unwrap();
    assert!(long.tail_estimate < short.tail_estimate);
    assert!(matches!(
        reconstruct_wavefunction(&model, Route::Mp, EnergyLabel::Continuum(-0.5), &xs, 10),
        Err(Error::Regime(_))
    ));
}

#[test]
fn validation_errors() {
    let bad_morse = PotentialModel::Morse { v0: 0.1, v1: -1.0, alpha: 1.0, nu: None };
    assert!(matches!(bound_spectrum(&bad_morse, Route::Mp, 0), Err(Error::Constraint(_))));
    let pt = PotentialModel::PoschlTeller { v0: 1.0, v1: 0.0, lambda: 1.0, a: None };
    assert!(matches!(pt.validate(), Err(Error::Constraint(_))));
    assert!(matches!(map_to_polynomial(&coulomb(-1.0, 0), Route::Wilson, -0.5), Err(Error::InvalidRoute { .. })));
    let table = table1_samples().remove(0);
    assert!(matches!(bound_spectrum(&table, Route::Wilson, 0), Err(Error::InvalidRoute { .. } | Error::UnsupportedFamily(_))));
}

#[test]
fn models_round_trip_through_json() {
    let mut models = vec![
        coulomb(-1.0, 2),
        PotentialModel::RosenMorse { depth: 2.5, barrier: 4.0, lambda: 1.0, a: Some(0.7) },
        PotentialModel::LogSpectrum { mu: -3.0, lambda: 1.0 },
    ];
    models.extend(table1_samples());
    for m in models {
        let text = serde_json::to_string(&m).unwrap();
        let back: PotentialModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
    assert!(serde_json::from_str::<PotentialModel>(r#"{"model":"coulomb","Z":-1,"ell":0,"bogus":1}"#).is_err());
}
