use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse failure class, used by the CLI to choose an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments or parameters supplied by the caller.
    Usage,
    /// Input data violates a schema or a domain invariant.
    Data,
    /// A numeric computation is undefined or diverged.
    Numeric,
    /// The filesystem or an I/O stream failed.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("no records")]
    NoRecords,

    #[error("invalid category code {0:?}: not in the category registry")]
    UnknownCode(String),

    #[error("line {line}: duplicate statement id {id:?}")]
    DuplicateId { line: usize, id: String },

    #[error("{0}")]
    Data(String),

    #[error("empty tally")]
    EmptyTally,

    #[error("missing predictions for {} statement ids: {}", .0.len(), id_list(.0))]
    MissingPredictions(Vec<String>),

    #[error("score {0} outside [-1, 1]")]
    ScoreOutOfRange(f64),

    #[error("manifesto yielded no chunks")]
    NoChunks,

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("label {0:?} is outside the label space")]
    UnknownLabel(String),

    #[error("non-finite loss {loss} at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize, loss: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidArgument(_) => ErrorKind::Usage,
            Error::EmptyTally
            | Error::UndefinedCorrelation(_)
            | Error::NonFiniteLoss { .. }
            | Error::ScoreOutOfRange(_) => ErrorKind::Numeric,
            Error::Io(_) => ErrorKind::Io,
            Error::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => ErrorKind::Io,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

fn id_list(ids: &[String]) -> String {
    const SHOWN: usize = 5;
    let head = ids.iter().take(SHOWN).map(String::as_str).collect::<Vec<_>>().join(", ");
    if ids.len() > SHOWN {
        format!("{head} and {} more", ids.len() - SHOWN)
    } else {
        head
    }
}
