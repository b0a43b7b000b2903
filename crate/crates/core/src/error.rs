//! Crate-wide error types.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (empty action set, zero dimension, bad parameter value).
    #[error("configuration error: {0}")]
    Config(String),

    /// A vector or matrix dimension did not match the model dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An action identifier that is not part of the model or action space.
    #[error("unknown action id {0}")]
    UnknownAction(u32),

    /// A context label outside the run's schema.
    #[error("unknown context label {0:?}")]
    UnknownContext(String),

    /// A non-finite or otherwise invalid numeric input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Dataset parse or validation failure, with the offending line when known.
    #[error("dataset error at line {line}: {message}")]
    Dataset { line: usize, message: String },

    /// Agent backend failure (remote transport, timeout, protocol).
    #[error("backend error: {0}")]
    Backend(#[from] BackendError),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Failures of a single agent invocation. Each variant carries the
/// wall-clock time spent before the failure, so a failed node can still be
/// charged for the time it consumed.
#[derive(Debug, Error)]
pub enum BackendError {
    /// The request did not complete within the configured timeout.
    #[error("timeout after {elapsed_s:.3}s")]
    Timeout { elapsed_s: f64 },

    /// The service answered with something that is not the expected protocol.
    #[error("protocol error after {elapsed_s:.3}s: {message}")]
    Protocol { message: String, elapsed_s: f64 },

    /// Connection or transport failure.
    #[error("transport error after {elapsed_s:.3}s: {message}")]
    Transport { message: String, elapsed_s: f64 },

    /// The backend has no profile or endpoint for the requested agent/context.
    #[error("not configured: {0}")]
    NotConfigured(String),
}

impl BackendError {
    /// Seconds spent before the failure surfaced.
    pub fn elapsed_s(&self) -> f64 {
        match self {
            BackendError::Timeout { elapsed_s }
            | BackendError::Protocol { elapsed_s, .. }
            | BackendError::Transport { elapsed_s, .. } => *elapsed_s,
            BackendError::NotConfigured(_) => 0.0,
        }
    }
}

impl Error {
    /// Short machine-readable tag for CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::UnknownAction(_) => "unknown_action",
            Error::UnknownContext(_) => "unknown_context",
            Error::InvalidInput(_) => "invalid_input",
            Error::Dataset { .. } => "dataset",
            Error::Backend(_) => "backend",
            Error::Checkpoint(_) => "checkpoint",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
