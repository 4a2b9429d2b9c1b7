//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide error enumeration.
///
/// The CLI maps these onto process exit codes: configuration problems exit
/// with 2, numerical failures (blow-up guard, non-finite values) with 3, and
/// verification failures (an asserted inequality or tolerance not met) with 4.
#[derive(Debug, Error)]
pub enum QnlsError {
    /// Invalid configuration, parameters, or input files.
    #[error("configuration error: {0}")]
    Config(String),

    /// The computation produced non-finite values or tripped the growth guard.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A verification run completed but the checked property failed.
    #[error("verification failure: {0}")]
    Verification(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed serialized data (checkpoints, manifests, configs).
    #[error("format error: {0}")]
    Format(String),
}

impl From<csv::Error> for QnlsError {
    fn from(e: csv::Error) -> Self {
        QnlsError::Format(e.to_string())
    }
}

impl From<serde_json::Error> for QnlsError {
    fn from(e: serde_json::Error) -> Self {
        QnlsError::Format(e.to_string())
    }
}

impl From<toml::de::Error> for QnlsError {
    fn from(e: toml::de::Error) -> Self {
        QnlsError::Format(e.to_string())
    }
}

impl From<toml::ser::Error> for QnlsError {
    fn from(e: toml::ser::Error) -> Self {
        QnlsError::Format(e.to_string())
    }
}

impl QnlsError {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            QnlsError::Config(_) => 2,
            QnlsError::Numerical(_) => 3,
            QnlsError::Verification(_) => 4,
            QnlsError::Io(_) | QnlsError::Format(_) => 2,
        }
    }
}
