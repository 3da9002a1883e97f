use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("incompatible field context: {0}")]
    Context(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("resource limit reached: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
