use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested order is not supported by the evaluation path.
    #[error("unsupported order: {0}")]
    UnsupportedOrder(String),

    /// Invalid configuration, such as a precision outside the allowed range.
    #[error("configuration error: {0}")]
    Config(String),

    /// A zero index violates the indexing condition for its family.
    #[error("index error: {0}")]
    Index(String),

    /// A theorem hypothesis fails, so no certified result can be produced.
    #[error("hypothesis refused: {0}")]
    Hypothesis(String),

    /// An iterative method failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
