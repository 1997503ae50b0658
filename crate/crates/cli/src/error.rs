use convnls_core::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    /// Outputs were written but the run ended abnormally.
    #[error("{message}")]
    Aborted { code: u8, message: String },
}

pub type CliResult<T> = Result<T, CliError>;

/// 1 for bad input, 2 for numerical failure, 3 for blow-up.
pub fn core_exit_code(e: &Error) -> u8 {
    match e {
        Error::NoConvergence { .. }
        | Error::ResolutionLoss { .. }
        | Error::TrapViolation { .. }
        | Error::WindowTooNoisy { .. } => 2,
        Error::NonFinite(_) => 3,
        _ => 1,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => core_exit_code(e),
            CliError::Aborted { code, .. } => *code,
            _ => 1,
        }
    }
}
