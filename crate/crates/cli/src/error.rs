use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("tolerance exceeded: {0}")]
    Tolerance(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn config(field: &str, reason: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{field}: {reason}"))
    }

    /// Core errors raised while building model objects from a config section
    /// are configuration errors under that section's path.
    pub fn nested(field: &str, err: cqed_core::Error) -> Self {
        CliError::Config(format!("{field}: {err}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) | CliError::Tolerance(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<cqed_core::Error> for CliError {
    fn from(e: cqed_core::Error) -> Self {
        match e {
            cqed_core::Error::InvalidParameter { .. } => CliError::Config(e.to_string()),
            cqed_core::Error::Tolerance { .. } => CliError::Tolerance(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
