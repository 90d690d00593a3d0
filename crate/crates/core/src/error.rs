use thiserror::Error;

use num_complex::Complex64;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} is not in the time scale")]
    NotInScale(f64),

    #[error("invalid time scale: {0}")]
    InvalidTimeScale(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("degree-0 or zero polynomial has no roots")]
    NoRoots,

    #[error("root finder did not converge after {iterations} sweeps")]
    RootsNotConverged {
        iterations: usize,
        partial: Vec<Complex64>,
    },

    #[error("QR iteration did not converge; {} eigenvalues found before failure", partial.len())]
    QrNotConverged { partial: Vec<Complex64> },

    #[error("characteristic function vanishes identically: every λ is an eigenvalue of the degenerate pencil")]
    Degenerate,

    #[error("matrix form rejected: {0}")]
    MatrixForm(String),

    #[error("integration budget exceeded: {0}")]
    Integration(String),

    #[error("contour count rejected: {0}")]
    Contour(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
