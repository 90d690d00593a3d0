//! Global root finding: Aberth–Ehrlich simultaneous iteration, then
//! clustering of nearby approximations into multiple roots.

use num_complex::Complex64;
use num_traits::Zero;

use super::{CPoly, QPoly};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
    /// `|p(value)|`
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Each root repeated by its multiplicity.
    pub fn flatten(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat(r.value).take(r.multiplicity))
            .collect()
    }
}

fn horner_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Rounding-error bound for evaluating `c` at `z` by Horner's rule.
fn eval_bound(c: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let s = c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm());
    4.0 * c.len() as f64 * f64::EPSILON * s
}

/// Raw Aberth iteration on a polynomial of degree ≥ 1 with a nonzero top
/// coefficient. Returns one approximation per root (with repetition).
pub(crate) fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lc = coeffs[n];
    let c: Vec<Complex64> = coeffs.iter().map(|&x| x / lc).collect();
    if n == 1 {
        return Ok(vec![-c[0]]);
    }
    // Cauchy bound radius, slightly rotated off the real axis.
    let radius = 1.0 + c[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, th)
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..MAX_SWEEPS {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = horner_with_derivative(&c, z[k]);
            if p.norm() <= eval_bound(&c, z[k]) {
                done[k] = true;
                continue;
            }
            let w = if dp.is_zero() {
                Complex64::new(1e-8 * (1.0 + z[k].norm()), 0.0)
            } else {
                p / dp
            };
            let s: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.is_zero() {
                        Complex64::zero()
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let corr = if denom.is_zero() { w } else { w / denom };
            z[k] -= corr;
            if corr.norm() <= 2.0 * f64::EPSILON * z[k].norm() {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    Err(Error::RootsNotConverged {
        iterations: MAX_SWEEPS,
        partial: z,
    })
}

fn cluster_radius(tol: f64, k: usize, at: Complex64) -> f64 {
    tol.max(1e-15).powf(1.0 / k as f64) * at.norm().max(1.0)
}

/// Group approximations into `(centroid, count)` clusters. Larger groups
/// are tried first: `k` approximations form a root of multiplicity `k` when
/// all of them lie within `tol^(1/k)` (relative to the magnitude) of their
/// centroid, the spread expected when a `k`-fold root is perturbed at level
/// `tol`.
pub fn cluster(values: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let n = values.len();
    let mut taken = vec![false; n];
    let mut groups = Vec::new();
    for k in (2..=n).rev() {
        for i in 0..n {
            if taken[i] {
                continue;
            }
            let mut near: Vec<(f64, usize)> = (0..n)
                .filter(|&j| !taken[j])
                .map(|j| ((values[j] - values[i]).norm(), j))
                .collect();
            if near.len() < k {
                continue;
            }
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            let members: Vec<usize> = near[..k].iter().map(|&(_, j)| j).collect();
            let centroid = members.iter().map(|&j| values[j]).sum::<Complex64>() / k as f64;
            let radius = cluster_radius(tol, k, centroid);
            if members.iter().all(|&j| (values[j] - centroid).norm() <= radius) {
                for &j in &members {
                    taken[j] = true;
                }
                groups.push((centroid, k));
            }
        }
    }
    for i in 0..n {
        if !taken[i] {
            groups.push((values[i], 1));
        }
    }
    groups
}

fn newton_polish(p: &CPoly, z0: Complex64, steps: usize) -> Complex64 {
    let c = p.coeffs();
    let mut z = z0;
    let mut best = (horner_with_derivative(c, z).0.norm(), z);
    for _ in 0..steps {
        let (v, dv) = horner_with_derivative(c, z);
        if dv.is_zero() || v.is_zero() {
            break;
        }
        z -= v / dv;
        let r = horner_with_derivative(c, z).0.norm();
        if r < best.0 {
            best = (r, z);
        } else {
            break;
        }
    }
    best.1
}

/// All complex roots with multiplicities.
///
/// A group of `k` approximations within `tol^(1/k)` of each other is
/// declared a root of multiplicity `k`; its centroid is refined by Newton's
/// method on `p^(k-1)`, which has a simple root there.
pub fn find_roots(p: &CPoly, tol: f64) -> Result<RootSet> {
    let p = p.floored();
    match p.degree() {
        None | Some(0) => return Err(Error::NoRoots),
        _ => {}
    }
    let approx = aberth(p.coeffs())?;
    let mut roots = Vec::new();
    for (centroid, k) in cluster(&approx, tol) {
        let value = if k == 1 {
            newton_polish(&p, centroid, 3)
        } else {
            let mut d = p.clone();
            for _ in 0..k - 1 {
                d = d.derivative();
            }
            let refined = newton_polish(&d, centroid, 8);
            if (refined - centroid).norm() <= cluster_radius(tol, k, centroid) {
                refined
            } else {
                centroid
            }
        };
        roots.push(Root {
            value,
            multiplicity: k,
            residual: p.eval_complex(value).norm(),
        });
    }
    Ok(RootSet { roots })
}

/// Roots of an exactly known rational polynomial. Multiplicities come from
/// the square-free decomposition, so no clustering is involved.
/// Polished roots of a real square-free polynomial with exactly `n_real`
/// real roots: the `n_real` approximations nearest the axis become real and
/// the rest are paired into exact conjugates.
fn real_structured(p: &CPoly, mut approx: Vec<Complex64>, n_real: usize) -> Vec<Complex64> {
    approx.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));
    let n_real = n_real.min(approx.len());
    let mut out: Vec<Complex64> = approx[..n_real]
        .iter()
        .map(|z| newton_polish(p, Complex64::new(z.re, 0.0), 3))
        .collect();
    let rest = &approx[n_real..];
    let (upper, mut lower): (Vec<Complex64>, Vec<Complex64>) = rest.iter().partition(|z| z.im > 0.0);
    if upper.len() != lower.len() {
        out.extend(rest.iter().map(|&z| newton_polish(p, z, 3)));
        return out;
    }
    for u in upper {
        let j = (0..lower.len())
            .min_by(|&a, &b| (lower[a].conj() - u).norm().total_cmp(&(lower[b].conj() - u).norm()))
            .expect("as many lower roots as upper");
        let l = lower.swap_remove(j);
        let z = newton_polish(p, (u + l.conj()) / 2.0, 3);
        out.push(z);
        out.push(z.conj());
    }
    out
}

pub fn find_roots_exact(p: &QPoly, _tol: f64) -> Result<RootSet> {
    match p.degree() {
        None | Some(0) => return Err(Error::NoRoots),
        _ => {}
    }
    let full = p.to_complex();
    let mut roots = Vec::new();
    for (factor, mult) in p.squarefree() {
        let fc: CPoly = factor.to_complex();
        for value in real_structured(&fc, aberth(fc.coeffs())?, factor.real_root_count()) {
            roots.push(Root {
                value,
                multiplicity: mult,
                residual: full.eval_complex(value).norm(),
            });
        }
    }
    Ok(RootSet { roots })
}

impl CPoly {
    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> CPoly {
        roots.iter().fold(CPoly::one(), |acc, &r| {
            &acc * &CPoly::new(vec![-r, Complex64::new(1.0, 0.0)])
        })
    }
}
