//! Matrix form of the problem on `T = {0, 1, ..., n-1}` with separated
//! boundary conditions
//!
//! ```text
//! y^Δ(0) + h y(0) = 0,    y^Δ(n-2) - H y(n-2) = 0.
//! ```
//!
//! Eliminating `y(0) = y(1)/(1-h)` and `y(n-1) = (1+H) y(n-2)` leaves an
//! `(n-2)×(n-2)` eigenproblem `Q y = λ y` for the unknowns
//! `y(1), ..., y(n-2)`, where `Q` is a tridiagonal second difference plus
//! one column carrying the potential.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{cluster, find_roots_exact, QPoly};
use crate::problem::{BoundaryCoefficients, Potential, ProblemSpec};
use crate::scalar::{Rational, Scalar};
use crate::spectrum::{Eigenvalue, Spectrum};
use crate::timescale::TimeScale;

/// Largest dimension for which the exact characteristic polynomial is the
/// default eigenvalue route.
pub const EXACT_ROUTE_MAX_DIM: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparatedBC {
    pub h: f64,
    pub big_h: f64,
}

impl SeparatedBC {
    pub fn new(h: f64, big_h: f64) -> Self {
        SeparatedBC { h, big_h }
    }
}

/// Square real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::MatrixForm("matrix must be square and nonempty".into()));
        }
        Ok(DenseMatrix {
            dim,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Entries lifted exactly into rationals.
    pub fn to_rational(&self) -> Vec<Vec<Rational>> {
        self.data
            .chunks(self.dim)
            .map(|r| r.iter().map(|&x| Rational::from_f64(x)).collect())
            .collect()
    }

    /// `‖(M - λI) v‖`
    pub fn shifted_apply_norm(&self, lambda: Complex64, v: &[Complex64]) -> f64 {
        (0..self.dim)
            .map(|i| {
                let row: Complex64 = (0..self.dim).map(|j| v[j] * self.get(i, j)).sum();
                (row - lambda * v[i]).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }
}

fn check_dims(n: usize, bc: &SeparatedBC, q: &[f64]) -> Result<()> {
    if n < 4 {
        return Err(Error::MatrixForm(format!("need n ≥ 4 grid points, got {n}")));
    }
    if bc.h == 1.0 {
        return Err(Error::MatrixForm(
            "h = 1 makes y(1) = 0 and the elimination of y(0) impossible; use the polynomial path".into(),
        ));
    }
    if q.len() != n - 2 {
        return Err(Error::MatrixForm(format!(
            "potential table must have n - 2 = {} entries, got {}",
            n - 2,
            q.len()
        )));
    }
    Ok(())
}

fn tridiagonal(n: usize, bc: &SeparatedBC) -> DenseMatrix {
    let d = n - 2;
    let mut m = DenseMatrix::zeros(d);
    for i in 0..d {
        m.set(i, i, 2.0);
        if i > 0 {
            m.set(i, i - 1, -1.0);
        }
        if i + 1 < d {
            m.set(i, i + 1, -1.0);
        }
    }
    m.set(0, 0, 2.0 - 1.0 / (1.0 - bc.h));
    let last = m.get(d - 1, d - 1);
    m.set(d - 1, d - 1, last - 1.0 - bc.big_h);
    m
}

/// `Q = Q1 + Q2` for `n` grid points, potential values `q(0), ..., q(n-3)`
/// and frozen argument `a ∈ {1, ..., n-2}`.
///
/// `Q1` is the second difference with corner entries `2 - 1/(1-h)` and
/// `1 - H`; `Q2` is zero except for column `a` (of the unknowns
/// `y(1), ..., y(n-2)`), which holds the potential values.
pub fn build_q(n: usize, bc: &SeparatedBC, q: &[f64], a: usize) -> Result<DenseMatrix> {
    check_dims(n, bc, q)?;
    if a == 0 || a > n - 2 {
        return Err(Error::MatrixForm(format!(
            "frozen argument a = {a} is outside 1..={}; the matrix has no column for y({a}). \
             Use the polynomial path (`eigs`) instead",
            n - 2
        )));
    }
    let mut m = tridiagonal(n, bc);
    for (i, &qi) in q.iter().enumerate() {
        let v = m.get(i, a - 1);
        m.set(i, a - 1, v + qi);
    }
    Ok(m)
}

/// Extension of [`build_q`] that also accepts `a = 0`, folding the potential
/// column through `y(0) = y(1)/(1-h)` into the first column. For `a ≥ 1` it
/// agrees with [`build_q`].
pub fn build_q_extended(n: usize, bc: &SeparatedBC, q: &[f64], a: usize) -> Result<DenseMatrix> {
    if a != 0 {
        return build_q(n, bc, q, a);
    }
    check_dims(n, bc, q)?;
    let mut m = tridiagonal(n, bc);
    let fold = 1.0 / (1.0 - bc.h);
    for (i, &qi) in q.iter().enumerate() {
        let v = m.get(i, 0);
        m.set(i, 0, v + qi * fold);
    }
    Ok(m)
}

/// General boundary coefficients equivalent to the separated conditions:
/// `U = h y(α) + y^Δ(α)`, `V = -H y(β) + y^Δ(β)`.
pub fn bc_to_general(bc: &SeparatedBC) -> BoundaryCoefficients {
    BoundaryCoefficients::new([bc.h, 1.0, 0.0, 0.0], [0.0, 0.0, -bc.big_h, 1.0])
}

/// The problem on the uniform scale `{0, ..., n-1}` that [`build_q`]
/// encodes.
pub fn uniform_problem(n: usize, bc: &SeparatedBC, q: &[f64], a: usize) -> Result<ProblemSpec> {
    if q.len() + 2 != n {
        return Err(Error::MatrixForm(format!(
            "potential table must have n - 2 = {} entries, got {}",
            n.saturating_sub(2),
            q.len()
        )));
    }
    let table = q.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect();
    ProblemSpec::new(
        TimeScale::uniform(n)?,
        a as f64,
        Potential::Table(table),
        bc_to_general(bc),
    )
}

/// `det(λI - M)` over the rationals by the Faddeev–LeVerrier recursion.
pub fn char_poly_exact(rows: &[Vec<Rational>]) -> QPoly {
    let d = rows.len();
    let matmul = |x: &[Vec<Rational>], y: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        (0..d).fold(Rational::zero(), |acc, k| {
                            if x[i][k].is_zero() || y[k][j].is_zero() {
                                acc
                            } else {
                                acc + &x[i][k] * &y[k][j]
                            }
                        })
                    })
                    .collect()
            })
            .collect()
    };
    // coefficients c[d] = 1, c[d-1], ..., c[0]
    let mut c = vec![Rational::zero(); d + 1];
    c[d] = Rational::one();
    let mut mk = vec![vec![Rational::zero(); d]; d];
    for k in 1..=d {
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &c[d - k + 1];
        }
        let am = matmul(rows, &mk);
        let tr = (0..d).fold(Rational::zero(), |acc, i| acc + &am[i][i]);
        c[d - k] = -tr / Rational::from_integer(k.into());
        mk = am;
    }
    QPoly::new(c)
}

fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for x in a[i].iter_mut() {
                        *x *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarity
/// transformations.
fn elmhes(a: &mut [Vec<f64>]) {
    let n = a.len();
    for m in 1..n.saturating_sub(1) {
        let mut x: f64 = 0.0;
        let mut piv = m;
        for j in m..n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                piv = j;
            }
        }
        if piv != m {
            a.swap(piv, m);
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..n {
                        let v = a[m][j];
                        a[i][j] -= y * v;
                    }
                    for row in a.iter_mut() {
                        let v = row[i];
                        row[m] += y * v;
                    }
                }
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        for x in row.iter_mut().take(i.saturating_sub(1)) {
            *x = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// iteration with deflation. At most `30·d` iterations are spent on any one
/// eigenvalue, with exceptional shifts every tenth iteration.
fn hqr(a: &mut [Vec<f64>]) -> Result<Vec<Complex64>> {
    let n = a.len();
    let max_its = 30 * n.max(1);
    let eps = f64::EPSILON;
    let mut wr = vec![Complex64::zero(); n];
    let mut found = vec![false; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let partial = |wr: &[Complex64], found: &[bool]| -> Vec<Complex64> {
        wr.iter().zip(found).filter(|(_, f)| **f).map(|(z, _)| *z).collect()
    };
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r, mut s, mut w, mut x, mut y, mut z);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= eps * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[nu][nu];
            if l == nu {
                wr[nu] = Complex64::new(x + t, 0.0);
                found[nu] = true;
                nn -= 1;
                break;
            }
            y = a[nu - 1][nu - 1];
            w = a[nu][nu - 1] * a[nu - 1][nu];
            if l + 1 == nu {
                p = 0.5 * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = Complex64::new(x + z, 0.0);
                    wr[nu] = wr[nu - 1];
                    if z != 0.0 {
                        wr[nu] = Complex64::new(x - w / z, 0.0);
                    }
                } else {
                    wr[nu] = Complex64::new(x + p, -z);
                    wr[nu - 1] = wr[nu].conj();
                }
                found[nu] = true;
                found[nu - 1] = true;
                nn -= 2;
                break;
            }
            if its == max_its {
                return Err(Error::QrNotConverged {
                    partial: partial(&wr, &found),
                });
            }
            if its > 0 && its % 10 == 0 {
                t += x;
                for i in 0..=nu {
                    a[i][i] -= x;
                }
                s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nu - 2;
            loop {
                z = a[m][m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r - s;
                r = a[m + 2][m + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nu - 1 {
                a[i + 2][i] = 0.0;
                if i != m {
                    a[i + 2][i - 1] = 0.0;
                }
            }
            for k in m..nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = 0.0;
                    if k + 1 != nu {
                        r = a[k + 2][k - 1];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        p = a[k][j] + q * a[k + 1][j];
                        if k + 1 != nu {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[i][k] + y * a[i][k + 1];
                        if k + 1 != nu {
                            p += z * a[i][k + 2];
                            a[i][k + 2] -= p * r;
                        }
                        a[i][k + 1] -= p * q;
                        a[i][k] -= p;
                    }
                }
            }
        }
    }
    Ok(wr)
}

/// Eigenvalues (with repetition) by balancing, Hessenberg reduction and
/// shifted QR.
pub fn eigenvalues_qr(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    let mut a = m.rows();
    balance(&mut a);
    elmhes(&mut a);
    hqr(&mut a)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EigenRoute {
    /// Exact characteristic polynomial up to [`EXACT_ROUTE_MAX_DIM`], QR
    /// beyond.
    #[default]
    Auto,
    Exact,
    Qr,
}

/// Solve `(M - sI) x = b` by Gaussian elimination with partial pivoting.
fn solve_shifted(m: &DenseMatrix, s: Complex64, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = m.dim();
    let mut a: Vec<Vec<Complex64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let v = Complex64::new(m.get(i, j), 0.0);
                    if i == j {
                        v - s
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut x = b.to_vec();
    for col in 0..d {
        let piv = (col..d).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].is_zero() {
            return None;
        }
        a.swap(piv, col);
        x.swap(piv, col);
        for i in col + 1..d {
            let f = a[i][col] / a[col][col];
            if f.is_zero() {
                continue;
            }
            for j in col..d {
                let v = a[col][j];
                a[i][j] -= f * v;
            }
            let v = x[col];
            x[i] -= f * v;
        }
    }
    for col in (0..d).rev() {
        let s: Complex64 = (col + 1..d).map(|j| a[col][j] * x[j]).sum();
        x[col] = (x[col] - s) / a[col][col];
    }
    Some(x)
}

/// Unit eigenvector estimate by inverse iteration with a slightly perturbed
/// shift.
pub fn eigenvector(m: &DenseMatrix, lambda: Complex64) -> Vec<Complex64> {
    let d = m.dim();
    let scale = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j).abs())
        .fold(1.0, f64::max);
    let shift = lambda + Complex64::new(1e-10, 1e-10) * scale.max(lambda.norm());
    let mut v: Vec<Complex64> = (0..d)
        .map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * i as f64))
        .collect();
    for _ in 0..3 {
        match solve_shifted(m, shift, &v) {
            Some(x) => {
                let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if !nrm.is_finite() || nrm == 0.0 {
                    break;
                }
                v = x.into_iter().map(|z| z / nrm).collect();
            }
            None => break,
        }
    }
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / nrm).collect()
}

/// `‖(M - λI)v‖ / ‖v‖` for the inverse-iteration eigenvector.
pub fn eigen_residual(m: &DenseMatrix, lambda: Complex64) -> f64 {
    let v = eigenvector(m, lambda);
    m.shifted_apply_norm(lambda, &v)
}

/// All eigenvalues with algebraic multiplicities.
pub fn eigs_dense(m: &DenseMatrix, tol: f64) -> Result<Spectrum> {
    eigs_dense_with(m, tol, EigenRoute::Auto)
}

pub fn eigs_dense_with(m: &DenseMatrix, tol: f64, route: EigenRoute) -> Result<Spectrum> {
    if m.dim() == 0 {
        return Err(Error::MatrixForm("empty matrix".into()));
    }
    let exact = match route {
        EigenRoute::Auto => m.dim() <= EXACT_ROUTE_MAX_DIM,
        EigenRoute::Exact => true,
        EigenRoute::Qr => false,
    };
    let groups: Vec<(Complex64, usize)> = if exact {
        let p = char_poly_exact(&m.to_rational());
        find_roots_exact(&p, tol)?
            .roots
            .into_iter()
            .map(|r| (r.value, r.multiplicity))
            .collect()
    } else {
        cluster(&eigenvalues_qr(m)?, tol)
    };
    Ok(Spectrum::new(
        groups
            .into_iter()
            .map(|(value, multiplicity)| Eigenvalue {
                value,
                multiplicity,
                residual: eigen_residual(m, value),
            })
            .collect(),
    ))
}

/// Full sequence `y(0), ..., y(n-1)` from an eigenvector of [`build_q`]
/// (the unknowns `y(1), ..., y(n-2)`).
pub fn reconstruct(bc: &SeparatedBC, v: &[Complex64]) -> Vec<Complex64> {
    let mut y = Vec::with_capacity(v.len() + 2);
    y.push(v[0] / (1.0 - bc.h));
    y.extend_from_slice(v);
    y.push(v[v.len() - 1] * (1.0 + bc.big_h));
    y
}

/// Max over interior `t` of
/// `|y(t+2) - 2y(t+1) + y(t) - q(t)y(a) + λy(t+1)|`, divided by `‖y‖`.
pub fn reduction_residual(q: &[f64], a: usize, lambda: Complex64, y: &[Complex64]) -> f64 {
    let nrm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let worst = q
        .iter()
        .enumerate()
        .map(|(t, &qt)| (y[t + 2] - y[t + 1] * 2.0 + y[t] - y[a] * qt + lambda * y[t + 1]).norm())
        .fold(0.0, f64::max);
    worst / nrm
}

/// Rational entries printed as `p/q`.
pub fn exact_rows(m: &DenseMatrix) -> Vec<Vec<String>> {
    m.to_rational()
        .iter()
        .map(|r| r.iter().map(|x| x.exact_string().unwrap_or_default()).collect())
        .collect()
}
