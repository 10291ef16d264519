use thiserror::Error;

use crate::construction::Exhaustion;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An enumeration or exhaustive computation exceeds the configured size cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no assignment beat the threshold after {} trials", .0.trials)]
    Exhausted(Box<Exhaustion>),

    #[error(transparent)]
    Certificate(#[from] crate::bounds::CertificateError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
