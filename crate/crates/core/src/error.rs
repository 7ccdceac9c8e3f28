use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("degenerate conditioning: {0}")]
    DegenerateConditioning(String),

    #[error("incomplete data: {0}")]
    IncompleteData(String),

    #[error("insufficient statistics: {0}")]
    InsufficientStatistics(String),

    #[error("binning mismatch: {0}")]
    BinningMismatch(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("truncation audit failed: {0}")]
    Truncation(String),

    #[error("unsupported order {requested} (maximum {max})")]
    OrderOutOfRange { requested: usize, max: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
