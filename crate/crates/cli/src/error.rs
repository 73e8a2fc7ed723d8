use hypwave_core::HypError;
use std::fmt;

/// Failures of a command run, each mapped to a process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Io(std::io::Error),
    Core(HypError),
    /// A numerical check failed; outputs were still written.
    Assertion(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                HypError::Convergence(_) | HypError::Construction(_) => 2,
                _ => 1,
            },
            CliError::Assertion(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Assertion(failed) => write!(f, "assertions failed: {}", failed.join(", ")),
        }
    }
}

impl std::error::Error for CliError {}

impl From<HypError> for CliError {
    fn from(e: HypError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e.to_string()))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
