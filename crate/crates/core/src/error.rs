use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("training diverged at step {step} (loss = {loss})")]
    Diverged { step: usize, loss: f64 },

    /// A pruning request would remove every weight of a layer.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("integrity error in record {record}: {reason}")]
    Integrity { record: String, reason: String },

    #[error("item {index}: {source}")]
    AtIndex {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub(crate) fn at(index: usize, err: Error) -> Self {
        Error::AtIndex {
            index,
            source: Box::new(err),
        }
    }

    /// True for failures caused by numerics (divergence, non-finite values),
    /// as opposed to bad data or I/O.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::Numeric(_) | Error::Diverged { .. } => true,
            Error::AtIndex { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}
