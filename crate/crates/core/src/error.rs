//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::schemes::SchemeKind;

#[derive(Debug, Error)]
pub enum CoreError {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration, rejected before any numerical work starts.
    #[error("configuration error: {0}")]
    Config(String),

    /// Courant number above 1; the march would be unstable.
    #[error("CFL violation: Courant number {courant:.6} exceeds 1")]
    CflViolation { courant: f64 },

    /// A marching scheme produced a non-finite field value.
    #[error("{scheme} solve diverged at step {step}")]
    Divergence { scheme: SchemeKind, step: usize },

    /// Matrix shapes disagree.
    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    /// A requested time slice is absent from a stored solution.
    #[error("no stored solution slice at t = {t}")]
    MissingSlice { t: f64 },

    /// Not enough (or degenerate) data for a regression or fit.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Operation needs synthetic provenance that the dataset lacks.
    #[error("dataset carries no synthetic provenance")]
    MissingProvenance,

    /// Normal matrix of the sensitivities is numerically singular.
    #[error("singular normal matrix (rank-deficient sensitivities)")]
    Singular,

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
