use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("commit rejected: {0}")]
    RejectedCommit(String),
    #[error("modularity is undefined for a graph without edges")]
    UndefinedModularity,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
