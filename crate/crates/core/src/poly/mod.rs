//! Dense univariate polynomials in the spectral parameter λ.
//!
//! Coefficients are stored in ascending degree. Construction trims exactly
//! zero top coefficients; the relative magnitude floor only enters where a
//! degree decision is made (`degree_and_leading`, root finding), so that
//! recurrences never lose small but genuine leading terms.

mod roots;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Rational, Scalar};

pub use roots::{cluster, find_roots, find_roots_exact, Root, RootSet};

/// Relative floor below which a top coefficient of an inexact polynomial is
/// treated as zero: `|c| <= COEFF_FLOOR * max |c_j|`.
pub const COEFF_FLOOR: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

pub type CPoly = Polynomial<Complex64>;
pub type QPoly = Polynomial<Rational>;

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    /// The indeterminate λ.
    pub fn lambda() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    pub fn from_f64(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| T::from_f64(c)).collect())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `λ^i` (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored degree; `None` is the zero-polynomial sentinel.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// True degree and leading coefficient after the magnitude floor.
    /// `None` for the zero polynomial.
    pub fn degree_and_leading(&self) -> Option<(usize, T)> {
        let t = self.floored();
        t.degree().map(|d| (d, t.coeffs[d].clone()))
    }

    /// Copy with top coefficients under the floor removed. Exact backends
    /// are returned unchanged.
    pub fn floored(&self) -> Self {
        if T::EXACT {
            return self.clone();
        }
        let max = self
            .coeffs
            .iter()
            .map(|c| c.magnitude())
            .fold(0.0, f64::max);
        let mut coeffs = self.coeffs.clone();
        while coeffs
            .last()
            .is_some_and(|c| c.magnitude() <= COEFF_FLOOR * max)
        {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// `p(a·λ + b)`.
    pub fn compose_linear(&self, a: &T, b: &T) -> Self {
        let inner = Self::new(vec![b.clone(), a.clone()]);
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &inner) + &Self::constant(c.clone());
        }
        acc
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * z + c.to_complex())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_f64(i as f64))
                .collect(),
        )
    }

    pub fn to_complex(&self) -> CPoly {
        Polynomial::new(self.coeffs.iter().map(|c| c.to_complex()).collect())
    }

    pub fn max_coeff_magnitude(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.magnitude())
            .fold(0.0, f64::max)
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: Self) -> Polynomial<T> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::new(out)
    }
}

impl<T: Scalar> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let c = c.exact_string().unwrap_or_else(|| format!("{c:?}"));
                match i {
                    0 => c,
                    1 => format!("({c})λ"),
                    _ => format!("({c})λ^{i}"),
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl QPoly {
    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => Self::zero(),
            Some(lc) => {
                let inv = Rational::one() / lc.clone();
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division, `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        if n <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = rem[k + dd].clone() / lc.clone();
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * dc.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Number of distinct real roots, from a Sturm sequence.
    pub fn real_root_count(&self) -> usize {
        let Some(d) = self.degree() else { return 0 };
        if d == 0 {
            return 0;
        }
        // positive rescaling keeps every sign while holding coefficients small
        let normalize = |p: QPoly| {
            let lc = p.coeffs.last().map(|c| c.abs()).unwrap_or_else(Rational::one);
            p.scale(&(Rational::one() / lc))
        };
        let mut seq = vec![normalize(self.clone()), normalize(self.derivative())];
        loop {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(normalize(-&r));
        }
        let changes = |signs: Vec<bool>| signs.windows(2).filter(|w| w[0] != w[1]).count();
        let at_pos_inf: Vec<bool> = seq.iter().map(|p| p.coeffs.last().is_some_and(|c| c.is_positive())).collect();
        let at_neg_inf: Vec<bool> = seq
            .iter()
            .map(|p| {
                let pos = p.coeffs.last().is_some_and(|c| c.is_positive());
                pos == (p.coeffs.len() % 2 == 1)
            })
            .collect();
        changes(at_neg_inf) - changes(at_pos_inf)
    }

    /// Yun's square-free decomposition: returns `(f_i, i)` with
    /// `self = lc · ∏ f_i^i`, each `f_i` monic, square-free and non-constant.
    pub fn squarefree(&self) -> Vec<(QPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }
}
