//! Coefficient fields for polynomials and recurrences.
//!
//! Two backends: `Complex64` for general numerics and `BigRational` for
//! exact degree and identity checks. Every finite `f64` is a dyadic rational,
//! so lifting inputs into the rational backend is exact.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Exact backends never need a magnitude floor.
    const EXACT: bool;

    fn from_f64(x: f64) -> Self;

    fn magnitude(&self) -> f64;

    fn to_complex(&self) -> Complex64;

    /// Exact textual form, `p/q` for rationals.
    fn exact_string(&self) -> Option<String> {
        None
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite input")
    }

    fn magnitude(&self) -> f64 {
        rational_to_f64(self).abs()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn exact_string(&self) -> Option<String> {
        Some(self.to_string())
    }
}

/// Correctly scaled conversion that survives numerators and denominators
/// beyond the `f64` range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64;
    let (num, den): (BigInt, BigInt) = if shift > 0 {
        (r.numer().clone(), r.denom().clone() << (shift as usize))
    } else {
        (r.numer().clone() << ((-shift) as usize), r.denom().clone())
    };
    // num/den is now within a factor of 2 of 1; keep 60 bits of it.
    let scaled = (num << 60usize) / den;
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32 - 60)
}
