use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported operation `{op}` on instance `{instance}`")]
    Unsupported { op: &'static str, instance: String },

    /// A size above the configured enumeration cap was requested.
    #[error("resource cap exceeded: {what} requested size {requested}, cap is {cap}")]
    Resource { what: String, requested: usize, cap: usize },

    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse { token: token.into(), reason: reason.into() }
    }

    pub(crate) fn resource(what: impl Into<String>, requested: usize, cap: usize) -> Self {
        Error::Resource { what: what.into(), requested, cap }
    }
}
