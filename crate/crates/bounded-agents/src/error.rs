//! Error type shared across the crate.
//!
//! Variants map onto the process exit codes used by the command-line tool:
//! configuration problems exit 2, dimension mismatches exit 3, malformed or
//! inconsistent data exits 4, and solver non-convergence exits 5. Everything
//! else (I/O, numerical blow-ups) exits 1.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or missing configuration (bad parameter value, unknown key).
    #[error("configuration error: {0}")]
    Config(String),

    /// Shapes disagree (parameter vector length, observation width, player count).
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Malformed input data. Carries a line number when it comes from a file.
    #[error("data error{}: {message}", match line { Some(n) => format!(" at line {n}"), None => String::new() })]
    Data { line: Option<u64>, message: String },

    /// Iterative solver exhausted its budget without meeting tolerance.
    #[error("did not converge: {message} (residual {residual:e})")]
    Convergence { residual: f64, message: String },

    /// A probability vector failed validation (negative mass, zero where
    /// positive mass is required, wrong length).
    #[error("invalid distribution: {0}")]
    Distribution(String),

    /// NaN or infinity where a finite number is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn data(message: impl Into<String>) -> Self {
        Error::Data { line: None, message: message.into() }
    }

    pub fn data_at(line: u64, message: impl Into<String>) -> Self {
        Error::Data { line: Some(line), message: message.into() }
    }

    /// Exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Dimension(_) => 3,
            Error::Data { .. } => 4,
            Error::Convergence { .. } => 5,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
