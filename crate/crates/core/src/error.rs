use std::path::PathBuf;

use thiserror::Error;

use crate::solver::SolveReport;

/// Errors raised by the numerical kernels, operators, solvers and I/O layers.
#[derive(Debug, Error)]
pub enum FracLapError {
    /// An argument lies outside the domain where the routine is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two grid objects that must share a geometry do not.
    #[error("grid mismatch: {0}")]
    SpecMismatch(String),

    /// A sampled field produced NaN or infinity.
    #[error("non-finite value {value} at point {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },

    /// A series or iteration failed to reach its tolerance.
    #[error("series did not converge after {terms} terms: {context}")]
    SeriesDivergence { terms: usize, context: String },

    /// The Krylov solver stopped at `max_iter` above the requested tolerance.
    #[error(
        "solver did not converge: relative residual {:.3e} after {} iterations",
        .report.relative_residual,
        .report.iterations
    )]
    NotConverged { report: Box<SolveReport> },

    /// A dense factorization failed (matrix not positive definite).
    #[error("factorization failed: {0}")]
    Factorization(String),

    /// A problem is too large for the requested code path.
    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = FracLapError> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(FracLapError::Domain(msg.into()))
}
