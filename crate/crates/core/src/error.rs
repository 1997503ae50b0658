use std::io;

use thiserror::Error;

/// Errors raised by the simulation and variational toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field mean {mean:.3e} exceeds zero-mode tolerance {tol:.3e}")]
    NonzeroMean { mean: f64, tol: f64 },

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("operation undefined on the zero field")]
    ZeroField,

    #[error("wave packet leaves the box: {0}")]
    BoxExit(String),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("tail fit residual {residual:.3e} exceeds threshold {threshold:.3e}")]
    WindowTooNoisy { residual: f64, threshold: f64 },

    #[error("bad fit window: {0}")]
    BadWindow(String),

    #[error("quadrature denominator vanishes near y = {y:.6e}")]
    DenominatorVanishes { y: f64 },

    #[error("unsupported dimension {0}")]
    UnsupportedDim(usize),

    #[error("inconsistent state: {0}")]
    InconsistentState(String),

    #[error("trapping violated at t = {t}: G = {value:.6e} >= bound {bound:.6e}")]
    TrapViolation { t: f64, value: f64, bound: f64 },

    #[error("relative mass drift {drift:.3e} at t = {t} exceeds abort threshold")]
    ResolutionLoss { t: f64, drift: f64 },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
