//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A case identifier outside {1, 2, 3, 4}.
    #[error("unknown case id {0}: expected 1, 2, 3 or 4")]
    UnknownCase(u8),

    /// A parameter set is missing required keys for its case.
    #[error("case {case} parameter set is missing keys: {}", keys.join(", "))]
    MissingParameters { case: u8, keys: Vec<String> },

    /// A parameter key that does not belong to the case.
    #[error("parameter \"{key}\" is not a parameter of case {case}")]
    UnknownParameter { case: u8, key: String },

    /// A parameter value that is not strictly positive and finite.
    #[error("parameter \"{key}\" must be a strictly positive finite number, got {value}")]
    NonPositiveParameter { key: String, value: f64 },

    /// A precondition on an operation's inputs was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An internal structural assumption failed (shape chaining, sign pattern).
    #[error("structural error: {0}")]
    Structural(String),

    /// The adaptive integrator could not continue.
    #[error("integration failure at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    /// Post-processing of a trajectory could not proceed.
    #[error("analysis error: {0}")]
    Analysis(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
