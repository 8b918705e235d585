use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("filter degeneracy at period {period}: every particle has zero likelihood")]
    FilterDegeneracy { period: usize },

    #[error("dataset {dataset}: {source}")]
    Study {
        dataset: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("data error at row {row}: {message}")]
    Data { row: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Coarse category used for CLI exit codes.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) => ErrorCategory::Config,
            Error::FilterDegeneracy { .. } => ErrorCategory::Numerical,
            Error::Study { source, .. } => source.category(),
            Error::InvalidInput(_) | Error::Data { .. } | Error::Csv(_) | Error::Io(_) => {
                ErrorCategory::Data
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Numerical,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Data => 3,
            ErrorCategory::Numerical => 4,
        }
    }
}
