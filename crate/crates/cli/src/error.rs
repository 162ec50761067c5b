use std::path::PathBuf;

use quadgenus::Error as CoreError;
use thiserror::Error;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;
pub const EXIT_SELFTEST: i32 = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("bad parameter: {0}")]
    Param(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("self-test failed: {0}")]
    Selftest(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                CoreError::Syntax { .. } => EXIT_PARSE,
                CoreError::InvalidParameter(_)
                | CoreError::InvalidEmbedding(_)
                | CoreError::Disconnected { .. }
                | CoreError::NotApplicable(_)
                | CoreError::VertexOutOfRange(_)
                | CoreError::BudgetExceeded { .. }
                | CoreError::Overflow(_) => EXIT_INVALID,
                CoreError::UnsupportedFamily(_) => EXIT_UNSUPPORTED,
                CoreError::InvalidSurgery(_)
                | CoreError::InvalidLink(_)
                | CoreError::NoPartition(_)
                | CoreError::ConstructionInvariant(_)
                | CoreError::ConstructionFailure(_) => EXIT_VERIFICATION,
            },
            CliError::Io { .. } => EXIT_OTHER,
            CliError::Json { .. } => EXIT_PARSE,
            CliError::Param(_) => EXIT_INVALID,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Selftest(_) => EXIT_SELFTEST,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
