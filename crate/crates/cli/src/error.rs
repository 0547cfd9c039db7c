//! Error-to-exit-code mapping.
//!
//! The process exits with 0 on success, 1 on a command-line usage error,
//! 2 on unreadable or invalid data (including configuration validation),
//! and 3 when an iteration budget ran out before convergence.

use std::path::Path;

use thiserror::Error;
use tradenet_core::{GravityError, IngestError, NetworkError, RichClubError, ScalingError};

pub const EXIT_USAGE: u8 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    /// Missing or malformed inputs, or an invalid configuration.
    #[error("{0}")]
    Data(String),
    /// A transaction or sweep budget was exhausted before convergence.
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Data(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

/// Attach the offending path to a bare I/O error.
pub fn io_error(path: &Path, err: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {err}", path.display()))
}

impl From<IngestError> for CliError {
    fn from(err: IngestError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<NetworkError> for CliError {
    fn from(err: NetworkError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<ScalingError> for CliError {
    fn from(err: ScalingError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<RichClubError> for CliError {
    fn from(err: RichClubError) -> Self {
        match err {
            RichClubError::NonConvergence { .. } => CliError::Budget(err.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<GravityError> for CliError {
    fn from(err: GravityError) -> Self {
        match err {
            GravityError::BudgetExhausted { .. } => CliError::Budget(err.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}
