mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use common::finite_spec_strategy;
use frozen_sl::finite::{
    build_basis, char_poly, char_value, check_eigenpair, eigs_finite, predict_leading, predicted_count,
    step_backward, step_forward, wronskian_from, LeadingOutcome, LeadingTarget,
};
use frozen_sl::{Arithmetic, Error, QPoly, Rational, Scalar};

fn rat(x: f64) -> Rational {
    Rational::from_f64(x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_follows_det_a(spec in finite_spec_strategy(3, 9)) {
        let p = predicted_count(&spec, Arithmetic::Rational).unwrap();
        let deg = char_poly::<Rational>(&spec).unwrap().degree();
        if p.exact {
            prop_assert_eq!(deg, Some(p.count));
        } else {
            prop_assert!(deg.is_none_or(|d| d < p.count));
        }
    }

    #[test]
    fn backward_step_inverts_forward_step(
        prev in prop::collection::vec(-5i32..=5, 1..4),
        cur in prop::collection::vec(-5i32..=5, 1..4),
        mu in 1u32..=8, mu_s in 1u32..=8, q in -6i32..=6, frozen in 0u32..=1,
    ) {
        let poly = |v: &[i32]| QPoly::new(v.iter().map(|&x| rat(x as f64)).collect());
        let (prev, cur) = (poly(&prev), poly(&cur));
        let (mu, mu_s) = (rat(mu as f64 / 4.0), rat(mu_s as f64 / 4.0));
        let (q, frozen) = (rat(q as f64 / 2.0), rat(frozen as f64));
        let next = step_forward(&prev, &cur, &mu, &mu_s, &q, &frozen);
        prop_assert_eq!(step_backward(&cur, &next, &mu, &mu_s, &q, &frozen), prev);
    }

    #[test]
    fn basis_solves_the_dynamic_equation(spec in finite_spec_strategy(3, 9)) {
        let t = build_basis::<Rational>(&spec).unwrap();
        let k = t.a_index;
        prop_assert!(t.s[k].is_zero());
        prop_assert_eq!(t.s_delta(k), QPoly::one());
        prop_assert_eq!(&t.c[k], &QPoly::one());
        prop_assert!(t.c_delta(k).is_zero());
        let lam = QPoly::lambda();
        for i in 0..t.n() - 2 {
            let q = rat(spec.q_at(t.points[i]));
            let inv = |j: usize| Rational::from_integer(1.into()) / t.gaps[j].clone();
            for (y, frozen) in [(&t.s, &t.s[k]), (&t.c, &t.c[k])] {
                let d0 = (&y[i + 1] - &y[i]).scale(&inv(i));
                let d1 = (&y[i + 2] - &y[i + 1]).scale(&inv(i + 1));
                let ydd = (&d1 - &d0).scale(&inv(i));
                // -y^ΔΔ + q(t) y(a) = λ y^σ
                let lhs = &frozen.scale(&q) - &ydd;
                prop_assert_eq!(lhs, &lam * &y[i + 1]);
            }
        }
    }

    #[test]
    fn wronskian_starts_at_one_and_moves_with_q(spec in finite_spec_strategy(3, 9)) {
        let t = build_basis::<Rational>(&spec).unwrap();
        let phi = wronskian_from(&t);
        prop_assert_eq!(&phi[t.a_index].1, &QPoly::one());
        for i in 0..phi.len() - 1 {
            let q = rat(spec.q_at(t.points[i]));
            let rhs = &phi[i].1 - &t.s[i + 1].scale(&(t.gaps[i].clone() * q));
            prop_assert_eq!(&phi[i + 1].1, &rhs);
        }
    }

    #[test]
    fn leading_terms_bound_the_degree(spec in finite_spec_strategy(6, 11)) {
        let t = build_basis::<Rational>(&spec).unwrap();
        for target in LeadingTarget::BASIS.iter().chain(&LeadingTarget::WRONSKIAN) {
            if let LeadingOutcome::Predicted(p) = predict_leading(&spec, *target).unwrap() {
                let poly = t.target(*target);
                // a vanishing q value zeroes a Wronskian coefficient and lowers the degree
                prop_assert_eq!(poly.coeff(p.degree), p.coefficient.clone());
                prop_assert!(poly.degree().is_none_or(|d| d <= p.degree));
            }
        }
    }

    #[test]
    fn float_and_rational_polynomials_agree(spec in finite_spec_strategy(3, 9)) {
        let exact = char_poly::<Rational>(&spec).unwrap();
        let float = char_poly::<Complex64>(&spec).unwrap();
        let scale = exact.max_coeff_magnitude().max(1.0);
        for i in 0..exact.coeffs().len().max(float.coeffs().len()) {
            let e = frozen_sl::scalar::rational_to_f64(&exact.coeff(i));
            prop_assert!((float.coeff(i) - e).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn polynomial_matches_direct_evaluation(spec in finite_spec_strategy(3, 9), re in -4.0..4.0f64, im in -4.0..4.0f64) {
        let z = Complex64::new(re, im);
        let p = char_poly::<Complex64>(&spec).unwrap();
        let direct = char_value(&spec, z).unwrap();
        prop_assert!((p.eval_complex(z) - direct).norm() <= 1e-8 * direct.norm().max(1.0));
    }

    #[test]
    fn spectrum_is_real_symmetric_with_small_residuals(spec in finite_spec_strategy(3, 8)) {
        match eigs_finite(&spec, 1e-10, Arithmetic::Rational) {
            Ok(sp) => {
                prop_assert!(sp.is_conjugate_closed(1e-8));
                let deg = char_poly::<Rational>(&spec).unwrap().degree().unwrap();
                prop_assert_eq!(sp.count(), deg);
                for e in &sp.eigenvalues {
                    let c = check_eigenpair(&spec, e.value).unwrap();
                    prop_assert!(c.sigma_min <= 1e-6 * c.matrix_norm.max(1.0), "{:?}", e);
                }
            }
            Err(Error::Degenerate) => prop_assert!(char_poly::<Rational>(&spec).unwrap().is_zero()),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}
