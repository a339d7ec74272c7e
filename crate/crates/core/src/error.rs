use std::path::PathBuf;

/// Errors raised across the crate.
///
/// Structural problems (inconsistent block shapes, wrong vector lengths) are
/// kept apart from spectral failures (loss of definiteness, rank deficiency)
/// so callers can tell malformed input from input that violates the
/// mathematical preconditions.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("{what} is not positive definite (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { what: String, min_eig: f64 },

    #[error("rank deficiency at level {level}: {detail}")]
    RankDeficient { level: usize, detail: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("singular approximation at level {level}: {detail}")]
    SingularApproximation { level: usize, detail: String },

    #[error("invalid indicator set: {0}")]
    InvalidIndicators(String),

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("{xi} is not a root of U_{degree} (residual {residual:.3e})")]
    NotARoot { degree: usize, xi: f64, residual: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("size guard exceeded: {0}")]
    Guard(String),

    #[error("infeasible target: {0}")]
    Infeasible(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("i/o error on {path}: {msg}")]
    Io { path: PathBuf, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
