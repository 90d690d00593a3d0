//! Spectral analysis of second-order dynamic equations with a frozen
//! argument on time scales.

pub mod cli;
pub mod continuum;
pub mod error;
pub mod finite;
pub mod matrix;
pub mod poly;
pub mod problem;
pub mod scalar;
pub mod spectrum;
pub mod timescale;

pub use error::{Error, Result};
pub use finite::Arithmetic;
pub use poly::{CPoly, Polynomial, QPoly};
pub use problem::{BoundaryCoefficients, Potential, ProblemSpec};
pub use scalar::{Rational, Scalar};
pub use spectrum::{Eigenvalue, Spectrum};
pub use timescale::TimeScale;
