use std::path::Path;

/// Failures that end a command, each tied to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Cipher(#[from] geostab::Error),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Parse(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        use geostab::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            // malformed data rather than malformed requests
            CliError::Cipher(E::DimensionMismatch { .. } | E::EmptyCloud | E::NonFinite(_) | E::SizeMismatch(_)) => 2,
            CliError::Cipher(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Decryption was not unique; a diagnosis was written instead.
    Diagnosis,
    /// A proved bound was violated during verification.
    Violation,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Diagnosis => 3,
            Outcome::Violation => 4,
        }
    }
}
