use thiserror::Error;

/// Errors raised by ingestion, indicator computation and the analysis passes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: missing column `{0}`")]
    MissingColumn(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at row {row}: {message}")]
    Row { row: usize, message: String },

    #[error("ingestion error: {0}")]
    Ingestion(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("unknown group `{0}`")]
    UnknownGroup(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("scaling error: {0}")]
    Scaling(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Process exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Parse,
    InsufficientData,
    Invariant,
    Io,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Usage => 2,
            ErrorClass::Parse => 3,
            ErrorClass::InsufficientData => 4,
            ErrorClass::Invariant => 5,
            ErrorClass::Io => 6,
        }
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Usage(_) | Error::Domain(_) | Error::UnknownGroup(_) => ErrorClass::Usage,
            Error::MissingColumn(_)
            | Error::Schema(_)
            | Error::Row { .. }
            | Error::Ingestion(_)
            | Error::Csv(_)
            | Error::Json(_)
            | Error::Config(_) => ErrorClass::Parse,
            Error::EmptyCorpus | Error::InsufficientData(_) | Error::Scaling(_) => {
                ErrorClass::InsufficientData
            }
            Error::Invariant(_) => ErrorClass::Invariant,
            Error::Io(_) => ErrorClass::Io,
        }
    }

    pub(crate) fn row(row: usize, message: impl Into<String>) -> Self {
        Error::Row {
            row,
            message: message.into(),
        }
    }
}
