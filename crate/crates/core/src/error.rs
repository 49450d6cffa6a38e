use std::fmt;

/// Errors raised anywhere in the estimation toolkit.
///
/// Each variant belongs to one failure class, which the command-line front
/// end maps onto a distinct process exit status (see [`Error::exit_code`]).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input text (JSON, CSV, numbers) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Parsed input violates a documented invariant.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// A required data channel is absent.
    #[error("missing channel `{0}`")]
    MissingChannel(String),

    /// Data is present but inconsistent (length or sampling mismatch).
    #[error("data error: {0}")]
    Data(String),

    /// A computation produced a non-finite value or an unstable filter.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure classes reported by the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Parse = 2,
    Validation = 3,
    Channel = 4,
    Numerical = 5,
}

impl fmt::Display for ExitStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as i32)
    }
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    pub fn exit_status(&self) -> ExitStatus {
        match self {
            Error::Parse(_) => ExitStatus::Parse,
            Error::Invalid { .. } => ExitStatus::Validation,
            Error::MissingChannel(_) | Error::Data(_) | Error::Io(_) => ExitStatus::Channel,
            Error::Numerical(_) => ExitStatus::Numerical,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.exit_status() as i32
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        use serde_json::error::Category;
        match err.classify() {
            Category::Io => Error::Io(err.into()),
            // Unknown keys and type mismatches surface as `Data` in serde_json;
            // both mean the document does not follow its schema.
            Category::Data => Error::invalid("document", err.to_string()),
            Category::Syntax | Category::Eof => Error::Parse(err.to_string()),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse(format!("{other:?}")),
        }
    }
}
