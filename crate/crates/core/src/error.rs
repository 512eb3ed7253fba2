//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("negative time t = {0}")]
    NegativeTime(f64),

    #[error("propagator singular at initial time (t = 0)")]
    SingularTime,

    #[error("kernel not positive definite at t = {t}: 4AtCt - Bt^2 = {disc:e}")]
    NotPositive { t: f64, disc: f64 },

    #[error("characteristic map is singular: det = {det:e}")]
    SingularMap { det: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("step too large at t = {t}: Picard difference ratio {ratio} >= 1 for 3 iterations")]
    StepTooLarge { t: f64, ratio: f64 },

    #[error("divergence at t = {t}: non-finite values")]
    Divergence { t: f64 },

    #[error("Picard iteration did not converge at t = {t} after {iters} iterations (rel. diff {diff:e})")]
    PicardNotConverged { t: f64, iters: usize, diff: f64 },

    #[error("t = {t} beyond the validity horizon {horizon}")]
    Horizon { t: f64, horizon: f64 },

    #[error("config error{}: {msg}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("oracle failure: {0}")]
    Oracle(String),
}

pub type WResult<T> = Result<T, WError>;

impl WError {
    pub fn config(line: Option<usize>, msg: impl Into<String>) -> Self {
        WError::Config { line, msg: msg.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        WError::Io { path: path.into(), source }
    }
}
