//! Process exit contract: 0 success, 2 configuration error, 3 numerical
//! failure, 4 I/O error. Harness scripts branch on these codes, so every
//! failure must land in exactly one bucket.

use advectfit_core::CoreError;

pub type Result<T> = std::result::Result<T, CliError>;

/// Top-level failure, bucketed by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable or invalid configuration, violated contracts
    /// (wrong shapes, missing provenance, unstable step ratios).
    #[error("{0}")]
    Config(String),
    /// The numerics gave up: divergent march, singular information matrix,
    /// degenerate regression.
    #[error("{0}")]
    Numerical(String),
    /// The filesystem or a serializer failed mid-run.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Domain(_)
            | CoreError::Config(_)
            | CoreError::CflViolation { .. }
            | CoreError::ShapeMismatch { .. }
            | CoreError::MissingSlice { .. }
            | CoreError::MissingProvenance => CliError::Config(msg),
            CoreError::Estimation(_) | CoreError::Divergence { .. } | CoreError::Singular => {
                CliError::Numerical(msg)
            }
            CoreError::Io(_) | CoreError::Csv(_) | CoreError::Json(_) => CliError::Io(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Serialization of our own output documents; config parse failures are
/// mapped to [`CliError::Config`] at the load site instead.
impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
