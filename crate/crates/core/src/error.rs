use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad class of a failure, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input data.
    Input,
    /// Valid input that does not meet an analysis precondition.
    Precondition,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("lexicon: {0}")]
    Lexicon(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate message_id `{0}`")]
    DuplicateMessage(String),

    #[error("attitude series: {0}")]
    Attitude(String),

    #[error("invalid month `{0}` (expected YYYY-MM)")]
    InvalidMonth(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing value at {month}; resolve gaps first (e.g. linear interpolation)")]
    MissingValue { month: String },

    #[error("series axes differ: {0}")]
    AxisMismatch(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io(_)
            | Error::Lexicon(_)
            | Error::Parse { .. }
            | Error::DuplicateMessage(_)
            | Error::Attitude(_)
            | Error::InvalidMonth(_) => ErrorKind::Input,
            Error::InvalidParameter(_)
            | Error::MissingValue { .. }
            | Error::AxisMismatch(_)
            | Error::InsufficientData(_) => ErrorKind::Precondition,
        }
    }
}
