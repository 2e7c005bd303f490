use thiserror::Error;

use qmetro_core::Error as CoreError;

/// Process exit status for success.
pub const EXIT_OK: i32 = 0;
/// A computation or validation check failed.
pub const EXIT_FAILURE: i32 = 1;
/// The invocation itself was invalid.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("at {at}: {source}")]
    AtPoint {
        at: String,
        #[source]
        source: CoreError,
    },
    #[error("validation failed: {0}")]
    ValidationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) | CliError::AtPoint { source: e, .. } => match e {
                CoreError::OutOfRange { .. }
                | CoreError::InvalidInput(_)
                | CoreError::SingularOperatingPoint(_)
                | CoreError::UnknownState(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            },
            CliError::Io { .. } | CliError::ValidationFailed(_) => EXIT_FAILURE,
        }
    }
}
