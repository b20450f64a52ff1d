use std::io;
use std::path::PathBuf;

/// Everything the command-line tool can fail with. Each variant maps to a
/// distinct exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Count(#[from] patternlab_core::Error),

    #[error("invalid input: {0}")]
    Usage(String),

    #[error("cache entry {path} is corrupt: {reason}")]
    CacheCorrupt { path: PathBuf, reason: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },

    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    /// 1 verification failure, 2 invalid input, 3 resource limit,
    /// 4 corrupt cache, 5 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Count(e) if e.is_resource() => 3,
            CliError::Count(patternlab_core::Error::IdentityViolation(_)) => 1,
            CliError::Count(_) => 2,
            CliError::CacheCorrupt { .. } => 4,
            CliError::Io { .. } => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
