use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Library(#[from] radcap::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("gallery failed: {}", .0.join(", "))]
    Gallery(Vec<String>),
}

impl CliError {
    /// 2 for bad input, 3 for numeric failures, 4 for a red gallery.
    pub fn exit_code(&self) -> i32 {
        use radcap::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Library(E::Parameter(_) | E::Precondition(_) | E::Unsupported(_)) => 2,
            CliError::Library(_) => 3,
            CliError::Gallery(_) => 4,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
