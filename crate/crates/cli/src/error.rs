use std::fmt;
use std::path::Path;

/// Process exit statuses. Stable contract.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration.
    Usage(String),
    /// Input that cannot be used: unreadable, malformed or inconsistent.
    Data { stage: &'static str, message: String },
    /// A failure that valid input should never cause.
    Internal(String),
}

impl CliError {
    pub fn data(stage: &'static str, err: impl fmt::Display) -> Self {
        CliError::Data {
            stage,
            message: err.to_string(),
        }
    }

    pub fn io(stage: &'static str, path: &Path, err: std::io::Error) -> Self {
        CliError::Data {
            stage,
            message: format!("{}: {err}", path.display()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data { .. } => EXIT_DATA,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data { stage, message } => write!(f, "error [{stage}]: {message}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
