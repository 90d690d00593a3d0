#![allow(dead_code)]

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;

use frozen_sl::matrix::SeparatedBC;
use frozen_sl::{BoundaryCoefficients, Potential, ProblemSpec, TimeScale};

/// Gaps are multiples of 1/4 so every point is exact in binary.
pub fn random_points(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let mut t = rng.gen_range(-4..=4) as f64 / 2.0;
    let mut pts = vec![t];
    for _ in 1..n {
        t += rng.gen_range(1..=8) as f64 / 4.0;
        pts.push(t);
    }
    pts
}

pub fn small_int(rng: &mut StdRng, bound: i32) -> f64 {
    rng.gen_range(-bound..=bound) as f64
}

pub fn table_potential(rng: &mut StdRng, pts: &[f64]) -> Potential {
    let n = pts.len();
    Potential::Table(pts[..n - 2].iter().map(|&t| (t, small_int(rng, 6) / 2.0)).collect())
}

/// Potential values drawn from `±{1/2, ..., 3}`, never zero.
pub fn nonzero_table_potential(rng: &mut StdRng, pts: &[f64]) -> Potential {
    let n = pts.len();
    Potential::Table(
        pts[..n - 2]
            .iter()
            .map(|&t| {
                let v = rng.gen_range(1..=6) as f64 / 2.0;
                (t, if rng.gen_bool(0.5) { v } else { -v })
            })
            .collect(),
    )
}

/// Boundary rows with integer entries and linearly independent rows.
pub fn random_bc(rng: &mut StdRng) -> BoundaryCoefficients {
    loop {
        let mut row = || [0; 4].map(|_: i32| small_int(rng, 3));
        let bc = BoundaryCoefficients::new(row(), row());
        if !bc.rows_dependent() {
            return bc;
        }
    }
}

/// Boundary rows with `det A = 0` at graininess `mu`: `a12` is solved from
/// `(a11 μ - a12) b22 = (b11 μ - b12) a22` with `b22 = 1`.
pub fn singular_bc(rng: &mut StdRng, mu: f64) -> BoundaryCoefficients {
    loop {
        let a11 = small_int(rng, 3);
        let a21 = small_int(rng, 3);
        let a22 = small_int(rng, 3);
        let [b11, b12, b21] = [0; 3].map(|_: i32| small_int(rng, 3));
        let a12 = a11 * mu - (b11 * mu - b12) * a22;
        let bc = BoundaryCoefficients::new([a11, a12, a21, a22], [b11, b12, b21, 1.0]);
        if !bc.rows_dependent() {
            return bc;
        }
    }
}

/// Finite-scale problem with `n` points and the frozen argument at index `k`.
pub fn finite_problem(rng: &mut StdRng, n: usize, k: usize, bc: Option<BoundaryCoefficients>) -> ProblemSpec {
    let pts = random_points(rng, n);
    let q = table_potential(rng, &pts);
    let bc = bc.unwrap_or_else(|| random_bc(rng));
    ProblemSpec::new(TimeScale::Finite(pts.clone()), pts[k], q, bc).expect("valid finite problem")
}

pub fn random_finite(rng: &mut StdRng, n_lo: usize, n_hi: usize) -> ProblemSpec {
    let n = rng.gen_range(n_lo..=n_hi);
    let k = rng.gen_range(0..=n - 2);
    finite_problem(rng, n, k, None)
}

/// Inputs of the uniform-scale matrix form: `(n, q on 0..n-2, a, bc)`.
pub fn random_uniform(rng: &mut StdRng) -> (usize, Vec<f64>, usize, SeparatedBC) {
    let n = rng.gen_range(4..=12);
    let q: Vec<f64> = (0..n - 2).map(|_| small_int(rng, 8) / 4.0).collect();
    let a = rng.gen_range(1..=n - 2);
    let h = loop {
        let h = small_int(rng, 8) / 4.0;
        if h != 1.0 {
            break h;
        }
    };
    let big_h = small_int(rng, 8) / 4.0;
    (n, q, a, SeparatedBC::new(h, big_h))
}

/// `[0, 1] ∪ [2, 3]` with `U = y'(α)`, `V = y'(β)` and constant `q`, for
/// which the large-eigenvalue hypotheses hold.
pub fn symmetric_two_interval(q: f64) -> ProblemSpec {
    ProblemSpec::new(
        TimeScale::TwoInterval {
            alpha: 0.0,
            delta1: 1.0,
            delta2: 2.0,
            beta: 3.0,
        },
        0.5,
        Potential::Constant(q),
        BoundaryCoefficients::new([0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]),
    )
    .expect("valid two-interval problem")
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn mixed_spectrum() -> ProblemSpec {
    ProblemSpec::new(
        TimeScale::Finite(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]),
        3.0,
        Potential::Table(vec![(0.0, -3.0), (1.0, 10.0), (2.0, -5.0), (3.0, 1.0)]),
        frozen_sl::matrix::bc_to_general(&SeparatedBC::new(0.5, 1.0)),
    )
    .expect("valid")
}

pub fn linear_potential() -> ProblemSpec {
    ProblemSpec::new(
        TimeScale::Finite(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]),
        4.0,
        Potential::Polynomial(vec![0.0, 1.0]),
        frozen_sl::matrix::bc_to_general(&SeparatedBC::new(0.0, 0.0)),
    )
    .expect("valid")
}

/// Finite-scale problems from quarter-unit gaps, half-integer potentials and
/// small integer boundary rows with independent rows.
pub fn finite_spec_strategy(n_lo: usize, n_hi: usize) -> impl proptest::strategy::Strategy<Value = ProblemSpec> {
    use proptest::prelude::*;
    (n_lo..=n_hi)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(1u32..=8, n - 1),
                -4i32..=4,
                prop::collection::vec(-6i32..=6, n - 2),
                0..=n - 2,
                prop::array::uniform4(-3i32..=3),
                prop::array::uniform4(-3i32..=3),
            )
        })
        .prop_filter_map("dependent boundary rows", |(gaps, start, qs, k, a, b)| {
            let mut t = start as f64 / 2.0;
            let mut pts = vec![t];
            for g in gaps {
                t += g as f64 / 4.0;
                pts.push(t);
            }
            let q = Potential::Table(pts.iter().zip(&qs).map(|(&t, &v)| (t, v as f64 / 2.0)).collect());
            let bc = BoundaryCoefficients::new(a.map(f64::from), b.map(f64::from));
            if bc.rows_dependent() {
                return None;
            }
            ProblemSpec::new(TimeScale::Finite(pts.clone()), pts[k], q, bc).ok()
        })
}
