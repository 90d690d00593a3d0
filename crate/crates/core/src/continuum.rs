//! Characteristic function on the two-interval scale `[α, δ1] ∪ [δ2, β]`.
//!
//! On the dense pieces the equation is `y'' = -λ y + q(t) c` with the frozen
//! value `c = y(a)` (0 for `S`, 1 for `C`). Solutions are written with the
//! entire functions `cos(√z x)` and `sin(√z x)/√z`, so nothing depends on the
//! branch of `√λ`. The gap `(δ1, δ2)` is bridged by the Δ-derivative at the
//! right-scattered point `δ1`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::{BoundaryCoefficients, Potential, ProblemSpec};
use crate::spectrum::{Eigenvalue, Spectrum};
use crate::timescale::TimeScale;

const SERIES_LIMIT: f64 = 1.0;
const MAX_PANELS: usize = 1 << 20;

/// `cos(√z x)`
pub fn cos_entire(z: Complex64, x: f64) -> Complex64 {
    let u = z * (x * x);
    if u.norm() <= SERIES_LIMIT {
        series(u, 0)
    } else {
        (z.sqrt() * x).cos()
    }
}

/// `sin(√z x) / √z`
pub fn sinc_entire(z: Complex64, x: f64) -> Complex64 {
    let u = z * (x * x);
    if u.norm() <= SERIES_LIMIT {
        series(u, 1) * x
    } else {
        let w = z.sqrt();
        (w * x).sin() / w
    }
}

/// `∫_0^x sin(√z v)/√z dv = (1 - cos(√z x)) / z`
pub fn sinc_integral(z: Complex64, x: f64) -> Complex64 {
    let u = z * (x * x);
    if u.norm() <= SERIES_LIMIT {
        series(u, 2) * (x * x)
    } else {
        (Complex64::new(1.0, 0.0) - (z.sqrt() * x).cos()) / z
    }
}

/// `Σ_k (-u)^k / (2k + shift)!`
fn series(u: Complex64, shift: u32) -> Complex64 {
    let mut fact: f64 = (1..=shift).map(f64::from).product();
    let mut term = Complex64::new(1.0 / fact, 0.0);
    let mut sum = term;
    for k in 1..40u32 {
        let (i, j) = (2 * k - 1 + shift, 2 * k + shift);
        fact = f64::from(i) * f64::from(j);
        term = -term * u / fact;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// Value and derivative of `S` or `C` at some point, tagged with the frozen
/// value `c = y(a)` of the branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootState {
    pub y: Complex64,
    pub dy: Complex64,
    pub frozen: f64,
}

impl ShootState {
    /// `S(a) = 0`, `S'(a) = 1`
    pub fn s_branch() -> Self {
        ShootState {
            y: Complex64::new(0.0, 0.0),
            dy: Complex64::new(1.0, 0.0),
            frozen: 0.0,
        }
    }

    /// `C(a) = 1`, `C'(a) = 0`
    pub fn c_branch() -> Self {
        ShootState {
            y: Complex64::new(1.0, 0.0),
            dy: Complex64::new(0.0, 0.0),
            frozen: 1.0,
        }
    }
}

/// Composite Simpson on `[0, x]` with `panels` (even) panels.
fn simpson<F: Fn(f64) -> (Complex64, Complex64)>(f: &F, x: f64, panels: usize) -> (Complex64, Complex64) {
    let h = x / panels as f64;
    let (mut s0, mut s1) = f(0.0);
    let (e0, e1) = f(x);
    s0 += e0;
    s1 += e1;
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        let (v0, v1) = f(h * i as f64);
        s0 += v0 * w;
        s1 += v1 * w;
    }
    (s0 * (h / 3.0), s1 * (h / 3.0))
}

/// `(∫_0^x s(x-u) q(t0+u) du, ∫_0^x c(x-u) q(t0+u) du)` on a piece where
/// `q` is smooth, by Simpson's rule with panel doubling.
fn forcing_piece(z: Complex64, t0: f64, x: f64, q: &Potential, tol: f64, total: f64) -> Result<(Complex64, Complex64)> {
    let f = |u: f64| {
        let qv = q.value(t0 + u).unwrap_or(f64::NAN);
        (sinc_entire(z, x - u) * qv, cos_entire(z, x - u) * qv)
    };
    let start = ((4.0 * z.sqrt().norm() * x.abs()).ceil() as usize).max(16);
    let mut panels = start + start % 2;
    let mut prev = simpson(&f, x, panels);
    loop {
        panels *= 2;
        if panels > MAX_PANELS {
            return Err(Error::Integration(format!(
                "Simpson quadrature over [{t0}, {}] did not reach tolerance {tol:e} with {MAX_PANELS} panels",
                t0 + x
            )));
        }
        let next = simpson(&f, x, panels);
        let err = (next.0 - prev.0).norm().max((next.1 - prev.1).norm()) / 15.0;
        let scale = next.0.norm().max(next.1.norm()).max(total);
        if err <= tol * scale.max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        prev = next;
    }
}

/// State at `to` from the state at `from`, both in one dense interval,
/// using the closed form
/// `y(t) = y0 cos + y0' sinc + c ∫ sinc(t-ξ) q(ξ) dξ`.
///
/// Constant potentials integrate exactly; other potentials use adaptive
/// Simpson quadrature split at the potential's breakpoints.
pub fn integrate_dense(
    state: ShootState,
    from: f64,
    to: f64,
    lambda: Complex64,
    q: &Potential,
    tol: f64,
) -> Result<ShootState> {
    let x = to - from;
    let (c, s) = (cos_entire(lambda, x), sinc_entire(lambda, x));
    let homogeneous_y = state.y * c + state.dy * s;
    let homogeneous_dy = -lambda * state.y * s + state.dy * c;
    if state.frozen == 0.0 || x == 0.0 {
        return Ok(ShootState {
            y: homogeneous_y,
            dy: homogeneous_dy,
            frozen: state.frozen,
        });
    }
    let (i, j) = match q.is_constant() {
        Some(qc) => (sinc_integral(lambda, x) * qc, s * qc),
        None => {
            let mut inner = q.breakpoints(from, to);
            if from > to {
                inner.reverse();
            }
            let cuts: Vec<f64> = std::iter::once(from).chain(inner).chain(std::iter::once(to)).collect();
            let scale = homogeneous_y.norm().max(homogeneous_dy.norm());
            let mut acc = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for w in cuts.windows(2) {
                // ∫_{w0}^{w1} sinc(to - ξ) q(ξ) dξ with ξ = w0 + u, shift by to - w1
                let (p0, p1) = forcing_piece(lambda, w[0], w[1] - w[0], q, tol, scale)?;
                let shift = to - w[1];
                if shift == 0.0 {
                    acc.0 += p0;
                    acc.1 += p1;
                } else {
                    // propagate the piece's particular solution from w1 to `to`
                    let (cs, ss) = (cos_entire(lambda, shift), sinc_entire(lambda, shift));
                    acc.0 += p0 * cs + p1 * ss;
                    acc.1 += -lambda * p0 * ss + p1 * cs;
                }
            }
            acc
        }
    };
    Ok(ShootState {
        y: homogeneous_y + i * state.frozen,
        dy: homogeneous_dy + j * state.frozen,
        frozen: state.frozen,
    })
}

/// Classical fourth-order Runge–Kutta for `(y, y')` with `steps` equal steps.
pub fn integrate_dense_rk4(
    state: ShootState,
    from: f64,
    to: f64,
    lambda: Complex64,
    q: &Potential,
    steps: usize,
) -> ShootState {
    let h = (to - from) / steps.max(1) as f64;
    let c = state.frozen;
    let rhs = |t: f64, y: Complex64| -lambda * y + q.value(t).unwrap_or(f64::NAN) * c;
    let (mut y, mut dy) = (state.y, state.dy);
    for k in 0..steps.max(1) {
        let t = from + h * k as f64;
        let k1y = dy;
        let k1d = rhs(t, y);
        let k2y = dy + k1d * (h / 2.0);
        let k2d = rhs(t + h / 2.0, y + k1y * (h / 2.0));
        let k3y = dy + k2d * (h / 2.0);
        let k3d = rhs(t + h / 2.0, y + k2y * (h / 2.0));
        let k4y = dy + k3d * h;
        let k4d = rhs(t + h, y + k3y * h);
        y += (k1y + k2y * 2.0 + k3y * 2.0 + k4y) * (h / 6.0);
        dy += (k1d + k2d * 2.0 + k3d * 2.0 + k4d) * (h / 6.0);
    }
    ShootState { y, dy, frozen: c }
}

/// State at `δ2` from the left-limit state at `δ1`.
///
/// `y(δ2) = y(δ1) + δ y'(δ1)` because `y^Δ(δ1)` is the difference quotient
/// over the gap and equals the left derivative; the equation at `δ1` with
/// `y^σ(δ1) = y(δ2)` then gives `y'(δ2) = y'(δ1) + δ (q(δ1) c - λ y(δ2))`.
pub fn cross_gap(state: ShootState, lambda: Complex64, q_delta1: f64, delta: f64) -> ShootState {
    let y = state.y + state.dy * delta;
    let dy = state.dy + (-lambda * y + q_delta1 * state.frozen) * delta;
    ShootState {
        y,
        dy,
        frozen: state.frozen,
    }
}

/// How the dense pieces are integrated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DenseMethod {
    ClosedForm { tol: f64 },
    Rk4 { steps_per_unit: usize },
}

impl Default for DenseMethod {
    fn default() -> Self {
        DenseMethod::ClosedForm { tol: 1e-12 }
    }
}

fn advance(
    state: ShootState,
    from: f64,
    to: f64,
    lambda: Complex64,
    q: &Potential,
    method: DenseMethod,
) -> Result<ShootState> {
    match method {
        DenseMethod::ClosedForm { tol } => integrate_dense(state, from, to, lambda, q, tol),
        DenseMethod::Rk4 { steps_per_unit } => {
            let steps = ((to - from).abs() * steps_per_unit as f64).ceil() as usize;
            Ok(integrate_dense_rk4(state, from, to, lambda, q, steps.max(1)))
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Geometry {
    alpha: f64,
    delta1: f64,
    delta2: f64,
    beta: f64,
}

fn geometry(spec: &ProblemSpec) -> Result<Geometry> {
    match spec.ts {
        TimeScale::TwoInterval {
            alpha,
            delta1,
            delta2,
            beta,
        } => Ok(Geometry {
            alpha,
            delta1,
            delta2,
            beta,
        }),
        TimeScale::Finite(_) => Err(Error::InvalidProblem(
            "a two-interval time scale is required".into(),
        )),
    }
}

/// `S` and `C` with their derivatives at `α` and `β`.
#[derive(Clone, Copy, Debug)]
pub struct EndpointStates {
    pub s_alpha: ShootState,
    pub s_beta: ShootState,
    pub c_alpha: ShootState,
    pub c_beta: ShootState,
}

impl EndpointStates {
    fn data(alpha: &ShootState, beta: &ShootState) -> [Complex64; 4] {
        [alpha.y, alpha.dy, beta.y, beta.dy]
    }

    pub fn s_data(&self) -> [Complex64; 4] {
        Self::data(&self.s_alpha, &self.s_beta)
    }

    pub fn c_data(&self) -> [Complex64; 4] {
        Self::data(&self.c_alpha, &self.c_beta)
    }
}

fn shoot_branch(
    spec: &ProblemSpec,
    g: &Geometry,
    start: ShootState,
    lambda: Complex64,
    method: DenseMethod,
) -> Result<(ShootState, ShootState)> {
    let at_alpha = advance(start, spec.a, g.alpha, lambda, &spec.q, method)?;
    let at_delta1 = advance(start, spec.a, g.delta1, lambda, &spec.q, method)?;
    let at_delta2 = cross_gap(at_delta1, lambda, spec.q_at(g.delta1), g.delta2 - g.delta1);
    let at_beta = advance(at_delta2, g.delta2, g.beta, lambda, &spec.q, method)?;
    Ok((at_alpha, at_beta))
}

pub fn endpoint_states(spec: &ProblemSpec, lambda: Complex64, method: DenseMethod) -> Result<EndpointStates> {
    let g = geometry(spec)?;
    let (s_alpha, s_beta) = shoot_branch(spec, &g, ShootState::s_branch(), lambda, method)?;
    let (c_alpha, c_beta) = shoot_branch(spec, &g, ShootState::c_branch(), lambda, method)?;
    Ok(EndpointStates {
        s_alpha,
        s_beta,
        c_alpha,
        c_beta,
    })
}

fn form(row: &[f64; 4], data: &[Complex64; 4]) -> Complex64 {
    row.iter().zip(data).map(|(r, v)| v * *r).sum()
}

/// `Δ(λ) = U(C) V(S) - V(C) U(S)` from endpoint data.
pub fn char_from_endpoints(bc: &BoundaryCoefficients, e: &EndpointStates) -> Complex64 {
    let (s, c) = (e.s_data(), e.c_data());
    form(&bc.a, &c) * form(&bc.b, &s) - form(&bc.b, &c) * form(&bc.a, &s)
}

pub fn char_fn(spec: &ProblemSpec, lambda: Complex64) -> Result<Complex64> {
    char_fn_with(spec, lambda, DenseMethod::default())
}

pub fn char_fn_with(spec: &ProblemSpec, lambda: Complex64, method: DenseMethod) -> Result<Complex64> {
    Ok(char_from_endpoints(&spec.bc, &endpoint_states(spec, lambda, method)?))
}

/// `S` and `C` at one point of the shoot.
#[derive(Clone, Copy, Debug)]
pub struct ProfilePoint {
    pub t: f64,
    pub s: ShootState,
    pub c: ShootState,
}

impl ProfilePoint {
    /// `S'C - SC'`, equal to 1 at `a`.
    pub fn wronskian(&self) -> Complex64 {
        self.s.dy * self.c.y - self.s.y * self.c.dy
    }
}

/// `S`, `C` on `samples` evenly spaced points of each dense piece (plus
/// `a`, `δ1` and `δ2`), ordered by `t`. The entry at `δ1` is the left limit
/// and the entry at `δ2` is the state after the gap.
pub fn shoot_profile(spec: &ProblemSpec, lambda: Complex64, samples: usize) -> Result<Vec<ProfilePoint>> {
    let g = geometry(spec)?;
    let samples = samples.max(2);
    let method = DenseMethod::default();
    let at = |t: f64, from: f64, s0: ShootState, c0: ShootState| -> Result<ProfilePoint> {
        Ok(ProfilePoint {
            t,
            s: advance(s0, from, t, lambda, &spec.q, method)?,
            c: advance(c0, from, t, lambda, &spec.q, method)?,
        })
    };
    let (s0, c0) = (ShootState::s_branch(), ShootState::c_branch());
    let mut out = Vec::new();
    let mut left: Vec<f64> = (0..samples)
        .map(|k| g.alpha + (g.delta1 - g.alpha) * k as f64 / (samples - 1) as f64)
        .collect();
    left.push(spec.a);
    left.sort_by(f64::total_cmp);
    left.dedup();
    for t in left {
        out.push(at(t, spec.a, s0, c0)?);
    }
    let end = *out.last().expect("nonempty");
    let dq = spec.q_at(g.delta1);
    let delta = g.delta2 - g.delta1;
    let s2 = cross_gap(end.s, lambda, dq, delta);
    let c2 = cross_gap(end.c, lambda, dq, delta);
    for k in 0..samples {
        let t = g.delta2 + (g.beta - g.delta2) * k as f64 / (samples - 1) as f64;
        out.push(at(t, g.delta2, s2, c2)?);
    }
    Ok(out)
}

/// Both sides of the jump relation for `ψ = C'S - CS'` across the gap:
/// `(ψ(δ2), ψ(δ1) + δ q(δ1) S(δ2))`.
pub fn wronskian_jump(spec: &ProblemSpec, lambda: Complex64) -> Result<(Complex64, Complex64)> {
    let g = geometry(spec)?;
    let method = DenseMethod::default();
    let s1 = advance(ShootState::s_branch(), spec.a, g.delta1, lambda, &spec.q, method)?;
    let c1 = advance(ShootState::c_branch(), spec.a, g.delta1, lambda, &spec.q, method)?;
    let delta = g.delta2 - g.delta1;
    let dq = spec.q_at(g.delta1);
    let (s2, c2) = (cross_gap(s1, lambda, dq, delta), cross_gap(c1, lambda, dq, delta));
    let psi = |s: &ShootState, c: &ShootState| c.dy * s.y - c.y * s.dy;
    Ok((psi(&s2, &c2), psi(&s1, &c1) + s2.y * (delta * dq)))
}

fn total_dense_length(spec: &ProblemSpec) -> Result<f64> {
    let g = geometry(spec)?;
    Ok((g.delta1 - g.alpha) + (g.beta - g.delta2))
}

/// Result of a real-axis scan.
#[derive(Clone, Debug, Default)]
pub struct RealScan {
    pub spectrum: Spectrum,
    /// Near-tangencies where `|Δ|` dips close to zero without a sign change
    /// and the box count did not settle the question.
    pub possible_double_roots: Vec<f64>,
}

fn brent<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, xtol: f64) -> f64 {
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return b;
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    b
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Real eigenvalues in `[lambda_min, lambda_max]`.
///
/// `Δ` is sampled on a grid uniform in `u` with `λ = u|u|`, fine enough to
/// resolve the oscillation `sin(√λ (β - α - δ))` (16 samples per expected
/// zero spacing). Sign changes are refined by Brent's method in `u`.
/// Local minima of `|Δ|` without a sign change are minimized by golden
/// section; if the minimum is below `tol` relative to the neighbourhood,
/// a small box count decides whether a double root sits there.
pub fn find_real_eigs(spec: &ProblemSpec, lambda_min: f64, lambda_max: f64, tol: f64) -> Result<RealScan> {
    if !(lambda_min < lambda_max) {
        return Ok(RealScan::default());
    }
    let length = total_dense_length(spec)?;
    let to_u = |l: f64| l.signum() * l.abs().sqrt();
    let to_l = |u: f64| u * u.abs();
    let (u0, u1) = (to_u(lambda_min), to_u(lambda_max));
    let du = std::f64::consts::PI / (16.0 * length);
    let steps = ((u1 - u0) / du).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| if k == steps { u1 } else { u0 + (u1 - u0) * k as f64 / steps as f64 })
        .collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&u| char_fn(spec, Complex64::new(to_l(u), 0.0)).map(|z| z.re))
        .collect::<Result<_>>()?;
    let f = |u: f64| {
        char_fn(spec, Complex64::new(to_l(u), 0.0))
            .map(|z| z.re)
            .unwrap_or(f64::NAN)
    };

    let local_scale = |i: usize| {
        let lo = i.saturating_sub(2);
        let hi = (i + 2).min(values.len() - 1);
        values[lo..=hi].iter().map(|v| v.abs()).fold(0.0, f64::max)
    };
    let mut eigenvalues = Vec::new();
    let mut flagged = Vec::new();
    let spacing_u = std::f64::consts::PI / (2.0 * length);
    for i in 0..steps {
        let (ua, ub) = (grid[i], grid[i + 1]);
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            let lam = to_l(ua);
            eigenvalues.push(Eigenvalue {
                value: Complex64::new(lam, 0.0),
                multiplicity: 1,
                residual: 0.0,
            });
            continue;
        }
        if fa.signum() != fb.signum() && fb != 0.0 {
            let xtol = 1e-14 * ua.abs().max(ub.abs()).max(1.0);
            let u = brent(&f, ua, ub, fa, fb, xtol);
            let scale = local_scale(i).max(f64::MIN_POSITIVE);
            eigenvalues.push(Eigenvalue {
                value: Complex64::new(to_l(u), 0.0),
                multiplicity: 1,
                residual: f(u).abs() / scale,
            });
        } else if i > 0 && fb != 0.0 {
            let fp = values[i - 1];
            // a same-sign local minimum of |Δ| hides a close pair or a tangency
            let is_min = fa.abs() < fp.abs() && fa.abs() < fb.abs() && fp.signum() == fa.signum();
            if is_min {
                let scale = local_scale(i).max(f64::MIN_POSITIVE);
                let s = fa.signum();
                let (um, gm) = golden_min(&|u| s * f(u), grid[i - 1], ub, 80);
                if gm < 0.0 {
                    // two simple roots closer than the grid spacing
                    for (lo, hi) in [(grid[i - 1], um), (um, ub)] {
                        let xtol = 1e-14 * lo.abs().max(hi.abs()).max(1.0);
                        let u = brent(&f, lo, hi, f(lo), f(hi), xtol);
                        eigenvalues.push(Eigenvalue {
                            value: Complex64::new(to_l(u), 0.0),
                            multiplicity: 1,
                            residual: f(u).abs() / scale,
                        });
                    }
                    continue;
                }
                let fm = gm.abs();
                if fm <= tol.max(1e-8) * scale {
                    let lam = to_l(um);
                    let half = (to_l(um + spacing_u / 4.0) - lam).abs().max(1e-3);
                    let count = count_eigs_in_box(
                        spec,
                        (lam - half, lam + half),
                        (-half, half),
                        2048,
                    );
                    match count {
                        Ok(2) => eigenvalues.push(Eigenvalue {
                            value: Complex64::new(lam, 0.0),
                            multiplicity: 2,
                            residual: fm / scale,
                        }),
                        Ok(0) => {}
                        _ => flagged.push(lam),
                    }
                }
            }
        }
    }
    Ok(RealScan {
        spectrum: Spectrum::new(eigenvalues),
        possible_double_roots: flagged,
    })
}

/// Number of zeros of `Δ` (with multiplicity) inside the rectangle
/// `re.0 < Re λ < re.1`, `im.0 < Im λ < im.1`, from the argument principle
/// `(1/2πi) ∮ Δ'/Δ dλ`.
///
/// `Δ'` is a central difference and the contour integral a trapezoid sum
/// with about `quad_points` nodes spread over the perimeter, doubled until
/// two successive sums round to the same integer with defect ≤ 0.25.
pub fn count_eigs_in_box(spec: &ProblemSpec, re: (f64, f64), im: (f64, f64), quad_points: usize) -> Result<usize> {
    if !(re.0 < re.1 && im.0 < im.1) {
        return Err(Error::Contour("box must have positive width and height".into()));
    }
    let corners = [
        Complex64::new(re.0, im.0),
        Complex64::new(re.1, im.0),
        Complex64::new(re.1, im.1),
        Complex64::new(re.0, im.1),
    ];
    let perimeter = 2.0 * ((re.1 - re.0) + (im.1 - im.0));
    let mut points = quad_points.max(64);
    let mut previous: Option<i64> = None;
    for _ in 0..6 {
        let (winding, guard) = winding_sum(spec, &corners, perimeter, points)?;
        if guard {
            return Err(Error::Contour(
                "|Δ| nearly vanishes on the box boundary; shrink or shift the box".into(),
            ));
        }
        let rounded = winding.round();
        let defect = (winding - rounded).abs();
        if defect <= 0.25 && previous == Some(rounded as i64) {
            if rounded < 0.0 {
                return Err(Error::Contour(format!("negative winding number {rounded}")));
            }
            return Ok(rounded as usize);
        }
        previous = (defect <= 0.25).then_some(rounded as i64);
        points *= 2;
    }
    Err(Error::Contour(
        "argument-principle quadrature did not settle; shrink the box or raise quad_points".into(),
    ))
}

fn winding_sum(spec: &ProblemSpec, corners: &[Complex64; 4], perimeter: f64, points: usize) -> Result<(f64, bool)> {
    let mut nodes: Vec<(Complex64, Complex64)> = Vec::new();
    for k in 0..4 {
        let (z0, z1) = (corners[k], corners[(k + 1) % 4]);
        let n = (((z1 - z0).norm() / perimeter) * points as f64).ceil().max(8.0) as usize;
        for j in 0..=n {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            let z = z0 + (z1 - z0) * (j as f64 / n as f64);
            nodes.push((z, (z1 - z0) * (w / n as f64)));
        }
    }
    let evals: Vec<(Complex64, Complex64)> = nodes
        .par_iter()
        .map(|&(z, _)| {
            let h = 1e-6 * z.norm().max(1.0);
            let d = (char_fn(spec, z + h)? - char_fn(spec, z - h)?) / (2.0 * h);
            Ok((char_fn(spec, z)?, d))
        })
        .collect::<Result<_>>()?;
    // |Δ| spans many orders of magnitude along a long box, so near-zeros are
    // judged against nearby nodes only
    let mags: Vec<f64> = evals.iter().map(|e| e.0.norm()).collect();
    let m = mags.len();
    const WINDOW: usize = 16;
    for k in 0..m {
        let local = (0..=2 * WINDOW)
            .map(|j| mags[(k + m + j - WINDOW) % m])
            .fold(0.0, f64::max);
        if mags[k] < 1e-8 * local || mags[k] == 0.0 {
            return Ok((0.0, true));
        }
    }
    let integral: Complex64 = nodes.iter().zip(&evals).map(|((_, w), (v, d))| d / v * w).sum();
    Ok(((integral / Complex64::new(0.0, 2.0 * std::f64::consts::PI)).re, false))
}

/// One row of the asymptotic comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct EigAsymptote {
    pub n: usize,
    /// `(n-1) π / (2(β - δ2))`
    pub predicted_sqrt: f64,
    pub computed_sqrt: f64,
    /// `computed_sqrt - predicted_sqrt`
    pub residual: f64,
    /// `n · residual`, bounded when the residual is `O(1/n)`.
    pub scaled_residual: f64,
}

#[derive(Clone, Debug, Default)]
pub struct AsymptoticTable {
    pub rows: Vec<EigAsymptote>,
    /// Set when the large-λ formula does not apply (unequal dense lengths
    /// or vanishing `a22 b12 - a12 b22`); rows are informational only.
    pub banner: Option<String>,
    /// Fewer computed eigenvalues than `n_max`.
    pub truncated: bool,
    /// `π / (2(β - δ2))`
    pub spacing: f64,
}

/// Compare computed real eigenvalues with `√λ_n ≈ (n-1) π / (2(β - δ2))`.
///
/// The index `n` of each computed value is its nearest grid point, since
/// the absolute index origin is not pinned by a count.
pub fn asymptotic_table(spec: &ProblemSpec, computed: &Spectrum, n_max: usize) -> Result<AsymptoticTable> {
    let g = geometry(spec)?;
    let spacing = std::f64::consts::PI / (2.0 * (g.beta - g.delta2));
    let mut problems = Vec::new();
    let (l1, l2) = (g.delta1 - g.alpha, g.beta - g.delta2);
    if (l1 - l2).abs() > 1e-12 * l1.max(l2) {
        problems.push(format!(
            "dense lengths differ (delta1 - alpha = {l1}, beta - delta2 = {l2})"
        ));
    }
    if spec.bc.dense_combination() == 0.0 {
        problems.push("a22*b12 - a12*b22 = 0".to_string());
    }
    let mut rows: Vec<EigAsymptote> = Vec::new();
    let mut sqrt: Vec<f64> = computed
        .flatten()
        .iter()
        .filter(|z| z.im.abs() <= 1e-9 * z.norm().max(1.0) && z.re > 0.0)
        .map(|z| z.re.sqrt())
        .collect();
    sqrt.sort_by(f64::total_cmp);
    for s in sqrt {
        let n = (s / spacing).round() as usize + 1;
        if n > n_max {
            break;
        }
        let predicted = (n - 1) as f64 * spacing;
        let residual = s - predicted;
        rows.push(EigAsymptote {
            n,
            predicted_sqrt: predicted,
            computed_sqrt: s,
            residual,
            scaled_residual: n as f64 * residual,
        });
    }
    let truncated = rows.last().map_or(true, |r| r.n < n_max);
    Ok(AsymptoticTable {
        rows,
        banner: (!problems.is_empty())
            .then(|| format!("asymptotic formula hypotheses fail: {}", problems.join("; "))),
        truncated,
        spacing,
    })
}

impl AsymptoticTable {
    fn window(&self, lo: usize, hi: usize) -> impl Iterator<Item = &EigAsymptote> {
        self.rows.iter().filter(move |r| lo <= r.n && r.n <= hi)
    }

    /// Least-squares slope of `ln|residual|` against `ln n` for `lo ≤ n ≤ hi`.
    pub fn decay_slope(&self, lo: usize, hi: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .window(lo, hi)
            .filter(|r| r.residual != 0.0)
            .map(|r| ((r.n as f64).ln(), r.residual.abs().ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (mx, my) = (sx / m, sy / m);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }

    /// Largest relative deviation of consecutive `√λ` differences from the
    /// predicted spacing, over consecutive indices in `lo..=hi`.
    pub fn spacing_deviation(&self, lo: usize, hi: usize) -> Option<f64> {
        let rows: Vec<&EigAsymptote> = self.window(lo, hi).collect();
        rows.windows(2)
            .filter(|w| w[1].n == w[0].n + 1)
            .map(|w| ((w[1].computed_sqrt - w[0].computed_sqrt) / self.spacing - 1.0).abs())
            .reduce(f64::max)
    }
}
