//! Subcommand implementations.

pub mod analyze;
pub mod ingest;
pub mod richclub;
pub mod simulate;

use serde::Serialize;
use tradenet_core::{PowerLawFit, ScalingError};

/// A fit that either succeeded or names the precondition it missed —
/// sparse data must show up as a marked gap, not as an error or a
/// fabricated number.
#[derive(Debug, Serialize)]
pub struct FitReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<PowerLawFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub insufficient: Option<String>,
}

impl FitReport {
    pub fn from_result(result: Result<PowerLawFit, ScalingError>) -> Self {
        match result {
            Ok(fit) => FitReport {
                fit: Some(fit),
                insufficient: None,
            },
            Err(err) => FitReport {
                fit: None,
                insufficient: Some(err.to_string()),
            },
        }
    }
}
