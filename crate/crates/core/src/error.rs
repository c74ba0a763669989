use alloc::string::String;

use crate::model::IdentityRef;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("identity not found: {0}")]
    NotFound(IdentityRef),

    #[error("could not resolve {url}: {reason}")]
    ResolutionFailed { url: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid model value: {0}")]
    Model(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("connector failure: {0}")]
    Backend(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
