use std::io;
use std::path::PathBuf;

use weyllab_core::Error as CoreError;

/// Exit status for malformed input.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status for numerical refusals and failed acceptance criteria.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A parameter failed to parse or is out of range.
    #[error("{param}: {message}")]
    Invalid { param: String, message: String },
    /// The numerical core refused the request.
    #[error("{param}: {source}")]
    Core {
        param: String,
        #[source]
        source: CoreError,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("suite {name}: {failed} of {total} criteria failed")]
    SuiteFailed { name: String, failed: usize, total: usize },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn invalid(param: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Invalid { param: param.into(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } | CliError::Io { .. } => EXIT_VALIDATION,
            CliError::Core { source, .. } if !source.is_numerical() => EXIT_VALIDATION,
            CliError::Core { .. } | CliError::SuiteFailed { .. } => EXIT_NUMERICAL,
        }
    }
}

/// Attaches the name of the parameter a core failure is blamed on.
pub trait Blame<T> {
    fn blame(self, param: &str) -> CliResult<T>;
}

impl<T> Blame<T> for Result<T, CoreError> {
    fn blame(self, param: &str) -> CliResult<T> {
        self.map_err(|source| CliError::Core { param: param.to_owned(), source })
    }
}
