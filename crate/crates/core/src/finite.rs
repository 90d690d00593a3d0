//! Spectra on finite time scales.
//!
//! On a finite scale the basis solutions `S(t, λ)` and `C(t, λ)` are
//! polynomials in λ at every grid point. They are generated from the frozen
//! argument `a` outwards with the three-term relation obtained by writing
//! the dynamic equation with difference quotients at two consecutive
//! right-scattered points:
//!
//! ```text
//! y(σ²t) = y(σt)·(1 + μσ/μ - λ μ μσ) - (μσ/μ)·y(t) + μ μσ q(t) y(a)
//! ```
//!
//! with `μ = μ(t)`, `μσ = μ(σt)`. The characteristic polynomial is the 2×2
//! determinant of the boundary forms applied to `C` and `S`.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{find_roots, find_roots_exact, Polynomial, COEFF_FLOOR};
use crate::problem::{BoundaryCoefficients, ProblemSpec};
use crate::scalar::{rational_to_f64, Rational, Scalar};
use crate::spectrum::{Eigenvalue, Spectrum};

/// Coefficient backend for polynomial constructions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Arithmetic {
    #[default]
    Float,
    Rational,
}

/// `y(σ²t)` from `y(t)`, `y(σt)`.
///
/// `frozen` is the constant value `y(a)`: zero for `S`, one for `C`.
pub fn step_forward<T: Scalar>(
    y_prev: &Polynomial<T>,
    y_cur: &Polynomial<T>,
    mu: &T,
    mu_sigma: &T,
    q_t: &T,
    frozen: &T,
) -> Polynomial<T> {
    let ratio = mu_sigma.clone() / mu.clone();
    let mm = mu.clone() * mu_sigma.clone();
    let factor = Polynomial::new(vec![T::one() + ratio.clone(), -mm.clone()]);
    let forcing = Polynomial::constant(mm * q_t.clone() * frozen.clone());
    &(&(y_cur * &factor) - &y_prev.scale(&ratio)) + &forcing
}

/// `y(t)` from `y(σt)`, `y(σ²t)`: the forward relation solved for its
/// `y(t)` term, whose coefficient `-μσ/μ` never vanishes.
pub fn step_backward<T: Scalar>(
    y_next: &Polynomial<T>,
    y_next2: &Polynomial<T>,
    mu: &T,
    mu_sigma: &T,
    q_t: &T,
    frozen: &T,
) -> Polynomial<T> {
    let ratio = mu_sigma.clone() / mu.clone();
    let mm = mu.clone() * mu_sigma.clone();
    let factor = Polynomial::new(vec![T::one() + ratio.clone(), -mm.clone()]);
    let forcing = Polynomial::constant(mm * q_t.clone() * frozen.clone());
    let num = &(&(y_next * &factor) + &forcing) - y_next2;
    num.scale(&(T::one() / ratio))
}

/// The literal variant of the forward `S` relation with the extra
/// `-λ μ² μσ` term and `-μσ·y(t)` coupling. Kept only so `verify` can show
/// that it disagrees with the dynamic equation on unit grids
/// (`2 - 2λ` instead of `2 - λ` after one step from `(0, 1)`).
pub fn literal_s_step<T: Scalar>(
    y_prev: &Polynomial<T>,
    y_cur: &Polynomial<T>,
    mu: &T,
    mu_sigma: &T,
) -> Polynomial<T> {
    let mm = mu.clone() * mu_sigma.clone();
    let factor = Polynomial::new(vec![
        T::one() + mu.clone() / mu_sigma.clone(),
        -(mm.clone() + mm * mu.clone()),
    ]);
    &(y_cur * &factor) - &y_prev.scale(mu_sigma)
}

/// `S` and `C` (and their Δ-derivatives) at every grid point.
#[derive(Clone)]
pub struct BasisTable<T> {
    pub points: Vec<f64>,
    pub a_index: usize,
    /// `μ(p_i)` for `i < n - 1`.
    pub gaps: Vec<T>,
    pub s: Vec<Polynomial<T>>,
    pub c: Vec<Polynomial<T>>,
}

impl<T: Scalar> BasisTable<T> {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    fn delta(&self, y: &[Polynomial<T>], i: usize) -> Polynomial<T> {
        (&y[i + 1] - &y[i]).scale(&(T::one() / self.gaps[i].clone()))
    }

    /// `S^Δ(p_i)` for `p_i ∈ T^κ`.
    pub fn s_delta(&self, i: usize) -> Polynomial<T> {
        self.delta(&self.s, i)
    }

    pub fn c_delta(&self, i: usize) -> Polynomial<T> {
        self.delta(&self.c, i)
    }

    /// `(y(α), y^Δ(α), y(β), y^Δ(β))` for `y = S` or `y = C`. At `β` the
    /// Δ-derivative is the forward quotient `(y(max T) - y(β)) / μ(β)`.
    fn boundary_data(&self, y: &[Polynomial<T>]) -> [Polynomial<T>; 4] {
        let b = self.n() - 2;
        [y[0].clone(), self.delta(y, 0), y[b].clone(), self.delta(y, b)]
    }

    pub fn boundary_s(&self) -> [Polynomial<T>; 4] {
        self.boundary_data(&self.s)
    }

    pub fn boundary_c(&self) -> [Polynomial<T>; 4] {
        self.boundary_data(&self.c)
    }

    /// The polynomial that a [`LeadingTarget`] refers to.
    pub fn target(&self, target: LeadingTarget) -> Polynomial<T> {
        let n = self.n();
        let (s, c) = (&self.s, &self.c);
        match target {
            LeadingTarget::SAtAlpha => s[0].clone(),
            LeadingTarget::SSigmaAtAlpha => s[1].clone(),
            LeadingTarget::SAtBeta => s[n - 2].clone(),
            LeadingTarget::SSigmaAtBeta => s[n - 1].clone(),
            LeadingTarget::CAtAlpha => c[0].clone(),
            LeadingTarget::CSigmaAtAlpha => c[1].clone(),
            LeadingTarget::CAtBeta => c[n - 2].clone(),
            LeadingTarget::CSigmaAtBeta => c[n - 1].clone(),
            LeadingTarget::WronskianAtAlpha => cross(&s[1], &c[0], &s[0], &c[1]),
            LeadingTarget::WronskianAtBeta => cross(&s[n - 1], &c[n - 2], &s[n - 2], &c[n - 1]),
        }
    }
}

/// `p1 q1 - p2 q2`. The top coefficients of the two products cancel, so in
/// floating point the rounding left above the true degree is trimmed against
/// the size of the products rather than the difference.
fn cross<T: Scalar>(p1: &Polynomial<T>, q1: &Polynomial<T>, p2: &Polynomial<T>, q2: &Polynomial<T>) -> Polynomial<T> {
    let (a, b) = (p1 * q1, p2 * q2);
    let diff = &a - &b;
    if T::EXACT {
        return diff;
    }
    let scale = a.max_coeff_magnitude().max(b.max_coeff_magnitude());
    let mut coeffs = diff.coeffs().to_vec();
    while coeffs.last().is_some_and(|x| x.magnitude() <= COEFF_FLOOR * scale) {
        coeffs.pop();
    }
    Polynomial::new(coeffs)
}

fn require_finite(spec: &ProblemSpec) -> Result<(&[f64], usize)> {
    let points = spec
        .ts
        .points()
        .ok_or_else(|| Error::InvalidProblem("a finite time scale is required".into()))?;
    let k = spec.ts.grid_point(spec.a)?.index;
    if k + 1 >= points.len() {
        return Err(Error::InvalidProblem(
            "frozen argument must be right-scattered (a in T^κ)".into(),
        ));
    }
    Ok((points, k))
}

fn exact_gaps<T: Scalar>(points: &[f64]) -> Vec<T> {
    points
        .windows(2)
        .map(|w| T::from_f64(w[1]) - T::from_f64(w[0]))
        .collect()
}

/// Seed `(S, S^σ) = (0, μ(a))`, `(C, C^σ) = (1, 1)` at `a` and sweep both
/// directions.
pub fn build_basis<T: Scalar>(spec: &ProblemSpec) -> Result<BasisTable<T>> {
    let (points, k) = require_finite(spec)?;
    let n = points.len();
    let gaps: Vec<T> = exact_gaps(points);
    let q: Vec<T> = points[..n - 2]
        .iter()
        .map(|&t| T::from_f64(spec.q_at(t)))
        .collect();

    let sweep = |frozen: T, at_a: Polynomial<T>, at_sigma_a: Polynomial<T>| {
        let mut y = vec![Polynomial::<T>::zero(); n];
        y[k] = at_a;
        y[k + 1] = at_sigma_a;
        for i in k..n - 2 {
            y[i + 2] = step_forward(&y[i], &y[i + 1], &gaps[i], &gaps[i + 1], &q[i], &frozen);
        }
        for i in (0..k).rev() {
            y[i] = step_backward(&y[i + 1], &y[i + 2], &gaps[i], &gaps[i + 1], &q[i], &frozen);
        }
        y
    };
    let s = sweep(
        T::zero(),
        Polynomial::zero(),
        Polynomial::constant(gaps[k].clone()),
    );
    let c = sweep(T::one(), Polynomial::one(), Polynomial::one());
    Ok(BasisTable {
        points: points.to_vec(),
        a_index: k,
        gaps,
        s,
        c,
    })
}

fn apply_form<T: Scalar>(row: &[f64; 4], data: &[Polynomial<T>; 4]) -> Polynomial<T> {
    row.iter()
        .zip(data)
        .filter(|(c, _)| **c != 0.0)
        .fold(Polynomial::zero(), |acc, (c, p)| {
            &acc + &p.scale(&T::from_f64(*c))
        })
}

/// The four entries `U(C), V(C), U(S), V(S)` as polynomials.
pub fn boundary_forms<T: Scalar>(
    table: &BasisTable<T>,
    bc: &BoundaryCoefficients,
) -> [Polynomial<T>; 4] {
    let (dc, ds) = (table.boundary_c(), table.boundary_s());
    [
        apply_form(&bc.a, &dc),
        apply_form(&bc.b, &dc),
        apply_form(&bc.a, &ds),
        apply_form(&bc.b, &ds),
    ]
}

/// `Δ(λ) = U(C)·V(S) - V(C)·U(S)`.
pub fn char_poly<T: Scalar>(spec: &ProblemSpec) -> Result<Polynomial<T>> {
    let table = build_basis::<T>(spec)?;
    Ok(char_poly_from(&table, &spec.bc).0)
}

/// Characteristic polynomial plus the magnitude of its two products, used
/// to tell cancellation noise from a genuine polynomial.
fn char_poly_from<T: Scalar>(
    table: &BasisTable<T>,
    bc: &BoundaryCoefficients,
) -> (Polynomial<T>, f64) {
    let [uc, vc, us, vs] = boundary_forms(table, bc);
    let left = &uc * &vs;
    let right = &vc * &us;
    let scale = left.max_coeff_magnitude().max(right.max_coeff_magnitude());
    (&left - &right, scale)
}

/// True when `Δ` vanishes identically (up to rounding in float mode).
fn is_degenerate<T: Scalar>(delta: &Polynomial<T>, scale: f64) -> bool {
    if T::EXACT {
        delta.is_zero()
    } else {
        delta.max_coeff_magnitude() <= 1e-12 * scale
    }
}

fn mu_alpha_exact(spec: &ProblemSpec) -> Result<Rational> {
    let (points, _) = require_finite(spec)?;
    Ok(Rational::from_f64(points[1]) - Rational::from_f64(points[0]))
}

pub fn det_a(spec: &ProblemSpec) -> Result<f64> {
    let (points, _) = require_finite(spec)?;
    Ok(spec.bc.det_a(points[1] - points[0]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountPrediction {
    pub n: usize,
    /// `n - 2`
    pub count: usize,
    /// `true`: exactly `count` eigenvalues; `false`: strictly fewer.
    pub exact: bool,
    pub det_a: f64,
    pub det_a_exact: Option<Rational>,
}

/// Eigenvalue count from the boundary data alone.
pub fn predicted_count(spec: &ProblemSpec, arith: Arithmetic) -> Result<CountPrediction> {
    let (points, _) = require_finite(spec)?;
    let n = points.len();
    let mu = points[1] - points[0];
    let det = spec.bc.det_a(mu);
    let (exact, det_exact) = match arith {
        Arithmetic::Rational => {
            let d = spec.bc.det_a_exact(&mu_alpha_exact(spec)?);
            (!d.is_zero(), Some(d))
        }
        Arithmetic::Float => (det.abs() > 1e-12 * spec.bc.det_a_scale(mu), None),
    };
    Ok(CountPrediction {
        n,
        count: n - 2,
        exact,
        det_a: det,
        det_a_exact: det_exact,
    })
}

/// Numeric values of `S` and `C` at every grid point for a fixed λ.
pub fn basis_values(spec: &ProblemSpec, lambda: Complex64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let (points, k) = require_finite(spec)?;
    let n = points.len();
    let gaps: Vec<f64> = points.windows(2).map(|w| w[1] - w[0]).collect();
    let sweep = |frozen: f64, y0: Complex64, y1: Complex64| {
        let mut y = vec![Complex64::zero(); n];
        y[k] = y0;
        y[k + 1] = y1;
        for i in k..n - 2 {
            let (mu, mus) = (gaps[i], gaps[i + 1]);
            let ratio = mus / mu;
            y[i + 2] = y[i + 1] * (1.0 + ratio - lambda * mu * mus) - y[i] * ratio
                + mu * mus * spec.q_at(points[i]) * frozen;
        }
        for i in (0..k).rev() {
            let (mu, mus) = (gaps[i], gaps[i + 1]);
            let ratio = mus / mu;
            y[i] = (y[i + 1] * (1.0 + ratio - lambda * mu * mus)
                + mu * mus * spec.q_at(points[i]) * frozen
                - y[i + 2])
                / ratio;
        }
        y
    };
    let one = Complex64::new(1.0, 0.0);
    Ok((
        sweep(0.0, Complex64::zero(), Complex64::new(gaps[k], 0.0)),
        sweep(1.0, one, one),
    ))
}

fn boundary_values(points: &[f64], y: &[Complex64]) -> [Complex64; 4] {
    let n = points.len();
    let d = |i: usize| (y[i + 1] - y[i]) / (points[i + 1] - points[i]);
    [y[0], d(0), y[n - 2], d(n - 2)]
}

/// `[[U(C), U(S)], [V(C), V(S)]]` at a fixed λ.
pub fn system_matrix(spec: &ProblemSpec, lambda: Complex64) -> Result<[[Complex64; 2]; 2]> {
    let (points, _) = require_finite(spec)?;
    let (s, c) = basis_values(spec, lambda)?;
    let (bs, bcv) = (boundary_values(points, &s), boundary_values(points, &c));
    let form = |row: &[f64; 4], d: &[Complex64; 4]| -> Complex64 {
        row.iter().zip(d).map(|(r, v)| v * *r).sum()
    };
    Ok([
        [form(&spec.bc.a, &bcv), form(&spec.bc.a, &bs)],
        [form(&spec.bc.b, &bcv), form(&spec.bc.b, &bs)],
    ])
}

/// `Δ(λ)` evaluated directly from the recurrence, without forming
/// polynomials.
pub fn char_value(spec: &ProblemSpec, lambda: Complex64) -> Result<Complex64> {
    let m = system_matrix(spec, lambda)?;
    Ok(m[0][0] * m[1][1] - m[1][0] * m[0][1])
}

/// Smallest singular value of a complex 2×2 matrix, a unit right singular
/// vector for it, and the spectral norm.
pub fn smallest_singular(m: &[[Complex64; 2]; 2]) -> (f64, [Complex64; 2], f64) {
    // H = M^* M
    let h11 = m[0][0].norm_sqr() + m[1][0].norm_sqr();
    let h22 = m[0][1].norm_sqr() + m[1][1].norm_sqr();
    let h12 = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
    let tr = h11 + h22;
    let disc = ((h11 - h22).powi(2) + 4.0 * h12.norm_sqr()).sqrt();
    let lmax = 0.5 * (tr + disc);
    let lmin = (0.5 * (tr - disc)).max(0.0);
    let v1 = [h12, Complex64::new(lmin - h11, 0.0)];
    let v2 = [Complex64::new(lmin - h22, 0.0), h12.conj()];
    let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
    let n2 = (v2[0].norm_sqr() + v2[1].norm_sqr()).sqrt();
    let v = if n1.max(n2) == 0.0 {
        [Complex64::new(1.0, 0.0), Complex64::zero()]
    } else if n1 >= n2 {
        [v1[0] / n1, v1[1] / n1]
    } else {
        [v2[0] / n2, v2[1] / n2]
    };
    (lmin.sqrt(), v, lmax.sqrt())
}

/// Eigenvalues as roots of `Δ`, each with the smallest singular value of
/// the boundary system at the root as residual.
pub fn eigs_finite(spec: &ProblemSpec, tol: f64, arith: Arithmetic) -> Result<Spectrum> {
    let roots = match arith {
        Arithmetic::Float => {
            let table = build_basis::<Complex64>(spec)?;
            let (delta, scale) = char_poly_from(&table, &spec.bc);
            if is_degenerate(&delta, scale) {
                return Err(Error::Degenerate);
            }
            if delta.degree_and_leading().is_some_and(|(d, _)| d == 0) {
                return Ok(Spectrum::default());
            }
            find_roots(&delta, tol)?
        }
        Arithmetic::Rational => {
            let table = build_basis::<Rational>(spec)?;
            let (delta, _) = char_poly_from(&table, &spec.bc);
            if delta.is_zero() {
                return Err(Error::Degenerate);
            }
            if delta.degree() == Some(0) {
                return Ok(Spectrum::default());
            }
            find_roots_exact(&delta, tol)?
        }
    };
    let mut eigenvalues = Vec::with_capacity(roots.roots.len());
    for r in &roots.roots {
        let m = system_matrix(spec, r.value)?;
        eigenvalues.push(Eigenvalue {
            value: r.value,
            multiplicity: r.multiplicity,
            residual: smallest_singular(&m).0,
        });
    }
    Ok(Spectrum::new(eigenvalues))
}

/// Residual report for an eigenpair reconstructed from the null vector of
/// the boundary system.
#[derive(Clone, Debug)]
pub struct EigenpairCheck {
    pub sigma_min: f64,
    pub matrix_norm: f64,
    /// Max over `T^κ²` of `|-y^ΔΔ(t) + q(t) y(a) - λ y(σt)|`, relative.
    pub equation_residual: f64,
    /// `max(|U(y)|, |V(y)|)`, relative.
    pub boundary_residual: f64,
}

pub fn check_eigenpair(spec: &ProblemSpec, lambda: Complex64) -> Result<EigenpairCheck> {
    let (points, k) = require_finite(spec)?;
    let n = points.len();
    let m = system_matrix(spec, lambda)?;
    let (sigma_min, v, norm) = smallest_singular(&m);
    let (s, c) = basis_values(spec, lambda)?;
    let y: Vec<Complex64> = (0..n).map(|i| v[0] * c[i] + v[1] * s[i]).collect();
    let ya = y[k];
    let ymax = y.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);

    let mut eq: f64 = 0.0;
    let mut eq_scale: f64 = 0.0;
    for i in 0..n - 2 {
        let (mu, mus) = (points[i + 1] - points[i], points[i + 2] - points[i + 1]);
        let d0 = (y[i + 1] - y[i]) / mu;
        let d1 = (y[i + 2] - y[i + 1]) / mus;
        let dd = (d1 - d0) / mu;
        let q = spec.q_at(points[i]);
        let res = -dd + ya * q - lambda * y[i + 1];
        eq = eq.max(res.norm());
        eq_scale = eq_scale
            .max(ymax * (2.0 / (mu * mu.min(mus))))
            .max((ya * q).norm())
            .max((lambda * y[i + 1]).norm());
    }
    let bv = boundary_values(points, &y);
    let form = |row: &[f64; 4]| -> Complex64 { row.iter().zip(&bv).map(|(r, v)| v * *r).sum() };
    let bscale = bv.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let bres = form(&spec.bc.a).norm().max(form(&spec.bc.b).norm());
    let row_scale = spec
        .bc
        .a
        .iter()
        .chain(&spec.bc.b)
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    Ok(EigenpairCheck {
        sigma_min,
        matrix_norm: norm,
        equation_residual: eq / eq_scale.max(f64::MIN_POSITIVE),
        boundary_residual: bres / (bscale * row_scale.max(1.0)),
    })
}

/// Which leading term of the basis table a prediction refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LeadingTarget {
    SAtAlpha,
    SSigmaAtAlpha,
    SAtBeta,
    SSigmaAtBeta,
    CAtAlpha,
    CSigmaAtAlpha,
    CAtBeta,
    CSigmaAtBeta,
    /// `S^σ(α)C(α) - S(α)C^σ(α)`
    WronskianAtAlpha,
    /// `S^σ(β)C(β) - S(β)C^σ(β)`
    WronskianAtBeta,
}

impl LeadingTarget {
    pub const BASIS: [LeadingTarget; 8] = [
        LeadingTarget::SAtAlpha,
        LeadingTarget::SSigmaAtAlpha,
        LeadingTarget::SAtBeta,
        LeadingTarget::SSigmaAtBeta,
        LeadingTarget::CAtAlpha,
        LeadingTarget::CSigmaAtAlpha,
        LeadingTarget::CAtBeta,
        LeadingTarget::CSigmaAtBeta,
    ];
    pub const WRONSKIAN: [LeadingTarget; 2] =
        [LeadingTarget::WronskianAtAlpha, LeadingTarget::WronskianAtBeta];
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeadingTermPrediction {
    pub target: LeadingTarget,
    pub degree: usize,
    pub coefficient: Rational,
}

impl LeadingTermPrediction {
    pub fn coefficient_f64(&self) -> f64 {
        rational_to_f64(&self.coefficient)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LeadingOutcome {
    Predicted(LeadingTermPrediction),
    /// The closed forms for the basis values need `r ≥ 3` and `m ≥ 2`;
    /// outside that range no formula value is produced.
    OutsideRegime { r: usize, m: usize },
}

/// Closed-form degree and leading coefficient of a basis-table entry,
/// computed from the graininess around `a` alone.
///
/// Basis targets follow the products of squared graininess obtained by
/// iterating the recurrence's top-degree term. Wronskian targets follow from
/// the Wronskian's own first-order recurrence; for `r < 3` (resp. `m < 3`)
/// the Wronskian is a constant and its exact value is returned.
pub fn predict_leading(spec: &ProblemSpec, target: LeadingTarget) -> Result<LeadingOutcome> {
    let (points, k) = require_finite(spec)?;
    let n = points.len();
    let gaps: Vec<Rational> = exact_gaps(points);
    let (m, r) = (n - 1 - k, k);
    // b(j) = μ(ρ^j a), f(j) = μ(σ^j a)
    let b = |j: usize| gaps[k - j].clone();
    let f = |j: usize| gaps[k + j].clone();
    let prod = |g: &dyn Fn(usize) -> Rational, lo: usize, hi: usize| -> Rational {
        (lo..=hi).fold(Rational::one(), |acc, j| acc * g(j))
    };
    let prod_sq = |g: &dyn Fn(usize) -> Rational, lo: usize, hi: usize| -> Rational {
        let p = if hi < lo { Rational::one() } else { prod(g, lo, hi) };
        p.clone() * p
    };
    let sign = |e: usize| {
        if e % 2 == 0 {
            Rational::one()
        } else {
            -Rational::one()
        }
    };
    let q = |t: f64| Rational::from_f64(spec.q_at(t));
    let mu_alpha = gaps[0].clone();
    let mu_beta = gaps[n - 2].clone();

    let predicted = |degree: usize, coefficient: Rational| {
        Ok(LeadingOutcome::Predicted(LeadingTermPrediction {
            target,
            degree,
            coefficient,
        }))
    };

    let basis_regime = r >= 3 && m >= 2;
    use LeadingTarget::*;
    match target {
        WronskianAtAlpha => {
            let qa = q(points[0]);
            match r {
                0 | 1 => predicted(0, mu_alpha),
                2 => predicted(0, mu_alpha * (Rational::one() - b(1) * b(2) * qa)),
                _ => predicted(
                    r - 2,
                    sign(r - 1) * mu_alpha * b(1) * prod_sq(&b, 2, r - 1) * b(r) * qa,
                ),
            }
        }
        WronskianAtBeta => match m {
            1 => predicted(0, mu_beta),
            2 => predicted(
                0,
                mu_beta * (Rational::one() - f(0) * f(0) * q(points[k])),
            ),
            _ => predicted(
                m - 2,
                sign(m - 1) * mu_beta * prod_sq(&f, 0, m - 2) * q(points[n - 3]),
            ),
        },
        _ if !basis_regime => Ok(LeadingOutcome::OutsideRegime { r, m }),
        SAtAlpha => predicted(r - 1, sign(r) * b(1) * prod_sq(&b, 2, r)),
        SSigmaAtAlpha => predicted(r - 2, sign(r - 1) * b(1) * prod_sq(&b, 2, r - 1)),
        SAtBeta => predicted(
            m - 2,
            sign(m) * (if m >= 3 { prod_sq(&f, 0, m - 3) } else { Rational::one() }) * f(m - 2),
        ),
        SSigmaAtBeta => predicted(m - 1, sign(m + 1) * prod_sq(&f, 0, m - 2) * f(m - 1)),
        CAtAlpha => predicted(r, sign(r) * prod_sq(&b, 1, r)),
        CSigmaAtAlpha => predicted(r - 1, sign(r - 1) * prod_sq(&b, 1, r - 1)),
        // C(β) = C^σ(a) = 1 when m = 2
        CAtBeta if m == 2 => predicted(0, Rational::one()),
        CAtBeta => predicted(
            m - 2,
            sign(m) * f(0) * (if m >= 4 { prod_sq(&f, 1, m - 3) } else { Rational::one() }) * f(m - 2),
        ),
        CSigmaAtBeta => predicted(
            m - 1,
            sign(m + 1) * f(0) * (if m >= 3 { prod_sq(&f, 1, m - 2) } else { Rational::one() }) * f(m - 1),
        ),
    }
}

/// `φ(t) = (S^σ(t)C(t) - S(t)C^σ(t)) / μ(t)` for every `t ∈ T^κ`, built from
/// the definition (its first-order recurrence is checked separately).
pub fn wronskian_table<T: Scalar>(spec: &ProblemSpec) -> Result<Vec<(f64, Polynomial<T>)>> {
    let table = build_basis::<T>(spec)?;
    Ok(wronskian_from(&table))
}

pub fn wronskian_from<T: Scalar>(table: &BasisTable<T>) -> Vec<(f64, Polynomial<T>)> {
    let (s, c) = (&table.s, &table.c);
    (0..table.n() - 1)
        .map(|i| {
            let w = cross(&s[i + 1], &c[i], &s[i], &c[i + 1]);
            (table.points[i], w.scale(&(T::one() / table.gaps[i].clone())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Potential;
    use crate::timescale::TimeScale;

    fn r(x: f64) -> Rational {
        Rational::from_f64(x)
    }

    fn qp(c: &[f64]) -> Polynomial<Rational> {
        Polynomial::from_f64(c)
    }

    fn neumann() -> BoundaryCoefficients {
        BoundaryCoefficients::new([0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0])
    }

    fn uniform_spec(n: usize, a: f64, q: Potential, bc: BoundaryCoefficients) -> ProblemSpec {
        ProblemSpec::new(TimeScale::uniform(n).unwrap(), a, q, bc).unwrap()
    }

    #[test]
    fn forward_step_examples() {
        let one = r(1.0);
        // S branch from (0, 1) on a unit grid
        let y = step_forward(&qp(&[0.0]), &qp(&[1.0]), &one, &one, &r(7.0), &r(0.0));
        assert_eq!(y, qp(&[2.0, -1.0]));
        // C branch from (1, 1): 1 - λ + q(a)
        let y = step_forward(&qp(&[1.0]), &qp(&[1.0]), &one, &one, &r(3.0), &r(1.0));
        assert_eq!(y, qp(&[4.0, -1.0]));
    }

    #[test]
    fn backward_step_inverts_forward() {
        let one = r(1.0);
        // uniform, S branch: y = (2 - λ)·y_next - y_next2 with (0, 1) -> -1
        let y = step_backward(&qp(&[0.0]), &qp(&[1.0]), &one, &one, &r(5.0), &r(0.0));
        assert_eq!(y, qp(&[-1.0]));
        // one backward C step from (1, C^σ) is linear in λ
        let (mu, mus) = (r(0.5), r(2.0));
        let y = step_backward(&qp(&[1.0]), &qp(&[3.0, -2.0]), &mu, &mus, &r(1.5), &r(1.0));
        assert_eq!(y.degree(), Some(1));
        // and stepping forward again recovers the input
        let back = step_forward(&y, &qp(&[1.0]), &mu, &mus, &r(1.5), &r(1.0));
        assert_eq!(back, qp(&[3.0, -2.0]));
    }

    #[test]
    fn literal_variant_disagrees_on_unit_grid() {
        let one = r(1.0);
        let y = literal_s_step(&qp(&[0.0]), &qp(&[1.0]), &one, &one);
        assert_eq!(y, qp(&[2.0, -2.0]));
    }

    #[test]
    fn basis_on_unit_grid() {
        for q in [Potential::Constant(0.0), Potential::Constant(-3.5), Potential::Polynomial(vec![1.0, 2.0])] {
            let spec = uniform_spec(6, 3.0, q, neumann());
            let t = build_basis::<Rational>(&spec).unwrap();
            assert!(t.s[3].is_zero());
            assert_eq!(t.c[3], qp(&[1.0]));
            assert_eq!(t.s[4], qp(&[1.0]));
            assert_eq!(t.s[5], qp(&[2.0, -1.0]));
            assert_eq!(t.s_delta(3), qp(&[1.0]));
            assert!(t.c_delta(3).is_zero());
        }
    }

    #[test]
    fn small_neumann_problem_has_roots_zero_and_two() {
        let spec = uniform_spec(4, 1.0, Potential::Constant(0.0), neumann());
        let d = char_poly::<Rational>(&spec).unwrap();
        // roots {0, 2}: Δ ∝ λ(λ - 2)
        assert_eq!(d.degree(), Some(2));
        assert!(d.coeff(0).is_zero());
        assert_eq!(d.coeff(1).clone() / d.coeff(2), r(-2.0));
        let sp = eigs_finite(&spec, 1e-10, Arithmetic::Float).unwrap();
        let v = sp.flatten();
        assert!(v[0].norm() < 1e-12 && (v[1] - 2.0).norm() < 1e-12);
    }

    #[test]
    fn identical_rows_are_degenerate() {
        let bc = BoundaryCoefficients::new([0.5, 1.0, 0.0, 0.0], [0.5, 1.0, 0.0, 0.0]);
        let spec = uniform_spec(6, 3.0, Potential::Constant(1.0), bc);
        assert!(char_poly::<Rational>(&spec).unwrap().is_zero());
        assert!(matches!(eigs_finite(&spec, 1e-10, Arithmetic::Float), Err(Error::Degenerate)));
        assert!(matches!(eigs_finite(&spec, 1e-10, Arithmetic::Rational), Err(Error::Degenerate)));
    }

    #[test]
    fn count_prediction_examples() {
        let sep = |h: f64| BoundaryCoefficients::new([h, 1.0, 0.0, 0.0], [0.0, 0.0, -1.0, 1.0]);
        let spec = uniform_spec(6, 3.0, Potential::Constant(1.0), sep(0.5));
        let p = predicted_count(&spec, Arithmetic::Rational).unwrap();
        assert_eq!((p.count, p.exact), (4, true));
        assert_eq!(p.det_a, -0.5);
        let spec = uniform_spec(6, 3.0, Potential::Constant(1.0), sep(1.0));
        let p = predicted_count(&spec, Arithmetic::Rational).unwrap();
        assert_eq!((p.count, p.exact), (4, false));
        assert_eq!(p.det_a_exact, Some(r(0.0)));
        let spec = uniform_spec(3, 0.0, Potential::Constant(1.0), sep(3.0));
        let p = predicted_count(&spec, Arithmetic::Float).unwrap();
        assert_eq!((p.count, p.exact), (1, true));
        assert_eq!(char_poly::<Rational>(&spec).unwrap().degree(), Some(1));
    }

    #[test]
    fn leading_term_unit_grid_examples() {
        // r = 3, m = 2
        let spec = uniform_spec(6, 3.0, Potential::Polynomial(vec![2.0, 1.0]), neumann());
        match predict_leading(&spec, LeadingTarget::SAtAlpha).unwrap() {
            LeadingOutcome::Predicted(p) => {
                assert_eq!((p.degree, p.coefficient_f64()), (2, -1.0));
            }
            other => panic!("{other:?}"),
        }
        // Wronskian at α: degree 1, coefficient +q(α) = 2
        let table = build_basis::<Rational>(&spec).unwrap();
        let w = table.target(LeadingTarget::WronskianAtAlpha);
        match predict_leading(&spec, LeadingTarget::WronskianAtAlpha).unwrap() {
            LeadingOutcome::Predicted(p) => {
                assert_eq!(p.degree, 1);
                assert_eq!(p.coefficient, r(2.0));
                assert_eq!(w.degree(), Some(1));
                assert_eq!(w.coeff(1), p.coefficient);
            }
            other => panic!("{other:?}"),
        }
        // r = 2 is outside the basis regime
        let spec = uniform_spec(6, 2.0, Potential::Constant(1.0), neumann());
        assert_eq!(
            predict_leading(&spec, LeadingTarget::CAtAlpha).unwrap(),
            LeadingOutcome::OutsideRegime { r: 2, m: 3 }
        );
    }

    #[test]
    fn wronskian_starts_at_one_and_is_one_without_potential() {
        let spec = uniform_spec(7, 2.0, Potential::Constant(0.0), neumann());
        let w = wronskian_table::<Rational>(&spec).unwrap();
        assert!(w.iter().all(|(_, p)| *p == qp(&[1.0])));
        let spec = uniform_spec(7, 2.0, Potential::Polynomial(vec![1.0, -1.0]), neumann());
        let w = wronskian_table::<Rational>(&spec).unwrap();
        assert_eq!(w[2].1, qp(&[1.0]));
    }

    #[test]
    fn numeric_values_match_polynomials() {
        let ts = TimeScale::finite(vec![0.0, 0.5, 1.25, 2.0, 2.25, 3.5, 4.0]).unwrap();
        let bc = BoundaryCoefficients::new([1.0, 0.5, -0.25, 2.0], [0.0, 1.5, 1.0, -1.0]);
        let spec = ProblemSpec::new(ts, 1.25, Potential::Polynomial(vec![1.0, -0.5, 0.25]), bc).unwrap();
        let d = char_poly::<Complex64>(&spec).unwrap();
        let lam = Complex64::new(0.7, -1.3);
        let direct = char_value(&spec, lam).unwrap();
        assert!((d.eval_complex(lam) - direct).norm() <= 1e-10 * direct.norm().max(1.0));
    }
}
