use num_complex::Complex64;
use proptest::prelude::*;
use tra_core::asymptotics::wrap_phase;
use tra_core::physics::{bound_spectrum, PotentialModel, Route};
use tra_core::polyfam::{poly_eval_closed, poly_eval_recursion, recurrence_coeffs, FamilyParams};
use tra_core::spectra::gauss_rule;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mp_recursion_agrees_with_closed_form(mu in 0.3f64..3.0, theta in 0.2f64..2.9, x in -4.0f64..4.0, n in 0usize..15) {
        let p = FamilyParams::meixner_pollaczek(mu, theta).unwrap();
        let r = poly_eval_recursion(&p, n, x).unwrap();
        let c = poly_eval_closed(&p, n, x).unwrap();
        prop_assert!((r - c).abs() <= 1e-10 * r.abs().max(1.0));
    }

    #[test]
    fn wilson_recurrence_is_symmetric_with_positive_sup(mu in 0.2f64..2.0, nu in 0.2f64..2.0, a in 0.2f64..2.0, b in 0.2f64..2.0) {
        let p = FamilyParams::wilson(mu, nu, Complex64::new(a, 0.0), Complex64::new(b, 0.0)).unwrap();
        let rc = recurrence_coeffs(&p, 16).unwrap();
        prop_assert!(rc.sup(0) > 0.0);
        prop_assert!(rc.symmetry_defect() < 1e-12);
    }

    #[test]
    fn gauss_weights_are_a_probability(mu in 0.3f64..2.5, a in 0.3f64..2.0, b in 0.3f64..2.0, m in 1usize..30) {
        let p = FamilyParams::continuous_dual_hahn(mu, Complex64::new(a, 0.0), Complex64::new(b, 0.0)).unwrap();
        let rule = gauss_rule(&p, m).unwrap();
        prop_assert!(rule.weights.iter().all(|&w| w > 0.0));
        prop_assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn racah_node_recursion_is_stable(alpha in 0.1f64..3.0, beta in 0.1f64..3.0, extra in 0.5f64..30.0, k in 0usize..=14) {
        let size = 14;
        let Ok(p) = FamilyParams::racah(size, alpha, beta, size as f64 + extra) else { return Ok(()) };
        for n in 0..=size {
            let r = poly_eval_recursion(&p, n, k as f64).unwrap();
            let c = poly_eval_closed(&p, n, k as f64).unwrap();
            prop_assert!((r - c).abs() <= 1e-9 * r.abs().max(1.0), "n={} k={}: {} vs {}", n, k, r, c);
        }
    }

    #[test]
    fn wrapped_phases_lie_in_range(x in -100.0f64..100.0) {
        let w = wrap_phase(x);
        prop_assert!((-std::f64::consts::PI..=std::f64::consts::PI).contains(&w));
        prop_assert!(((x - w) / (2.0 * std::f64::consts::PI)).fract().abs() < 1e-9 || ((x - w) / (2.0 * std::f64::consts::PI)).fract().abs() > 1.0 - 1e-9);
    }

    #[test]
    fn coulomb_levels_increase_towards_threshold(z in -5.0f64..-0.1, ell in 0u32..4) {
        let model = PotentialModel::Coulomb { charge: z, ell, lambda: 1.0, nu: None };
        let e = bound_spectrum(&model, Route::Mp, 8).unwrap().values();
        prop_assert!(e.windows(2).all(|w| w[0] < w[1] && w[1] < 0.0));
    }
}
