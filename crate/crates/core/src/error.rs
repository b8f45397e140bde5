use thiserror::Error;

/// Errors raised by the analysis library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented range or structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A statistical estimate could not be formed from the data.
    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
