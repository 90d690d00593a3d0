mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use common::{c, symmetric_two_interval};
use frozen_sl::continuum::{
    char_fn, char_fn_with, char_from_endpoints, cos_entire, count_eigs_in_box, find_real_eigs, integrate_dense,
    shoot_profile, sinc_entire, sinc_integral, wronskian_jump, DenseMethod, EndpointStates, ShootState,
};
use frozen_sl::{BoundaryCoefficients, Potential, ProblemSpec, TimeScale};

fn two_interval(delta2: f64, q: Potential, bc: BoundaryCoefficients) -> ProblemSpec {
    ProblemSpec::new(
        TimeScale::TwoInterval {
            alpha: 0.0,
            delta1: 1.0,
            delta2,
            beta: delta2 + 1.0,
        },
        0.4,
        q,
        bc,
    )
    .unwrap()
}

fn potentials() -> impl Strategy<Value = Potential> {
    prop_oneof![
        (-3.0..3.0f64).prop_map(Potential::Constant),
        prop::collection::vec(-2.0..2.0f64, 1..4).prop_map(Potential::Polynomial),
        prop::collection::vec(-2.0..2.0f64, 5).prop_map(|v| Potential::Sampled {
            grid: vec![0.0, 0.7, 1.5, 2.6, 4.0],
            values: v,
        }),
    ]
}

fn boundary() -> impl Strategy<Value = BoundaryCoefficients> {
    (prop::array::uniform4(-2i32..=2), prop::array::uniform4(-2i32..=2))
        .prop_map(|(a, b)| BoundaryCoefficients::new(a.map(f64::from), b.map(f64::from)))
        .prop_filter("dependent rows", |bc| !bc.rows_dependent())
}

fn lambdas() -> impl Strategy<Value = Complex64> {
    (-40.0..200.0f64, -15.0..15.0f64).prop_map(|(re, im)| c(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closed_form_agrees_with_rk4(q in potentials(), bc in boundary(), z in lambdas()) {
        let spec = two_interval(2.0, q, bc);
        let a = char_fn(&spec, z).unwrap();
        let b = char_fn_with(&spec, z, DenseMethod::Rk4 { steps_per_unit: 4000 }).unwrap();
        prop_assert!((a - b).norm() <= 1e-6 * a.norm().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn characteristic_function_is_real_on_real_data(q in potentials(), bc in boundary(), z in lambdas()) {
        let spec = two_interval(2.5, q, bc);
        let a = char_fn(&spec, z).unwrap();
        let b = char_fn(&spec, z.conj()).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn characteristic_function_is_entire(q in potentials(), bc in boundary(), cr in -20.0..80.0f64, ci in -5.0..5.0f64, r in 0.5..6.0f64) {
        let spec = two_interval(2.0, q, bc);
        let m = 256;
        let (mut sum, mut max) = (Complex64::new(0.0, 0.0), 0.0f64);
        for j in 0..m {
            let w = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
            let v = char_fn(&spec, c(cr, ci) + w).unwrap();
            max = max.max(v.norm());
            sum += v * w;
        }
        // trapezoid rule is spectrally accurate for ∮ Δ dλ, which vanishes
        prop_assert!(sum.norm() / m as f64 <= 1e-9 * max * r);
    }

    #[test]
    fn wronskian_is_one_at_a_and_jumps_through_q(qv in -4.0..4.0f64, bc in boundary(), z in lambdas(), gap in 0.2..2.0f64) {
        let spec = two_interval(1.0 + gap, Potential::Constant(qv), bc);
        let prof = shoot_profile(&spec, z, 8).unwrap();
        let at_a = prof.iter().find(|p| p.t == spec.a).unwrap();
        prop_assert!((at_a.wronskian() - 1.0).norm() <= 1e-12);
        let (lhs, rhs) = wronskian_jump(&spec, z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-8 * lhs.norm().max(1.0));
    }

    #[test]
    fn wronskian_is_constant_without_potential(bc in boundary(), z in lambdas()) {
        let spec = two_interval(2.0, Potential::Constant(0.0), bc);
        for p in shoot_profile(&spec, z, 16).unwrap() {
            prop_assert!((p.wronskian() - 1.0).norm() <= 1e-9 * (1.0 + p.s.y.norm() * p.c.dy.norm()));
        }
    }

    #[test]
    fn entire_kernels_are_continuous_at_the_series_switch(arg in 0.0..std::f64::consts::TAU, x in 0.5..2.0f64) {
        // |z x²| = 1 on both sides of the switch
        let z_in = Complex64::from_polar((1.0 - 1e-9) / (x * x), arg);
        let z_out = Complex64::from_polar((1.0 + 1e-9) / (x * x), arg);
        for f in [cos_entire, sinc_entire, sinc_integral] {
            prop_assert!((f(z_in, x) - f(z_out, x)).norm() <= 1e-8);
        }
    }
}

/// `S`, `C` on `[α, β]` with no gap, for comparison with a shrinking gap.
fn no_gap_char(spec: &ProblemSpec, beta: f64, z: Complex64) -> Complex64 {
    let run = |init: ShootState| {
        let left = integrate_dense(init, spec.a, 0.0, z, &spec.q, 1e-13).unwrap();
        let right = integrate_dense(init, spec.a, beta, z, &spec.q, 1e-13).unwrap();
        (left, right)
    };
    let (s_alpha, s_beta) = run(ShootState::s_branch());
    let (c_alpha, c_beta) = run(ShootState::c_branch());
    char_from_endpoints(&spec.bc, &EndpointStates { s_alpha, s_beta, c_alpha, c_beta })
}

#[test]
fn shrinking_gap_converges_quadratically_to_the_unbroken_interval() {
    let bc = BoundaryCoefficients::new([1.0, 0.5, 0.0, 0.0], [0.0, 0.0, 1.0, 2.0]);
    let z = c(7.3, 1.1);
    let mut errs = Vec::new();
    for k in 2..9 {
        let eps = 0.5f64.powi(k);
        // [0, 1] ∪ [1 + ε, 2 + ε] against [0, 2 + ε]: the bridge is one Euler
        // step, exact to first order in ε
        let spec = two_interval(1.0 + eps, Potential::Constant(1.5), bc);
        let limit = no_gap_char(&spec, 2.0 + eps, z);
        errs.push((char_fn(&spec, z).unwrap() - limit).norm());
    }
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.2..4.8).contains(&ratio), "errors {errs:?}");
    }
}

#[test]
fn real_roots_are_zeros_and_boxes_see_them() {
    let spec = symmetric_two_interval(0.7);
    let scan = find_real_eigs(&spec, -50.0, 400.0, 1e-12).unwrap();
    assert!(scan.spectrum.count() >= 10);
    for e in &scan.spectrum.eigenvalues {
        assert!(e.residual <= 1e-8, "{e:?}");
        let x = e.value.re;
        let k = count_eigs_in_box(&spec, (x - 1e-2, x + 1e-2), (-1e-2, 1e-2), 256).unwrap();
        assert_eq!(k, e.multiplicity, "box around {x}");
    }
}

#[test]
fn close_pairs_are_two_simple_roots() {
    // Dirichlet-Neumann on the symmetric scale puts pairs much closer than the scan grid
    let spec = two_interval(
        2.0,
        Potential::Constant(1.0),
        BoundaryCoefficients::new([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]),
    );
    let scan = find_real_eigs(&spec, -10.0, 900.0, 1e-12).unwrap();
    let boxed = count_eigs_in_box(&spec, (-10.0, 900.0), (-5.0, 5.0), 4096).unwrap();
    assert_eq!(scan.spectrum.count(), boxed);
    assert!(scan.spectrum.eigenvalues.iter().all(|e| e.multiplicity == 1));
}
