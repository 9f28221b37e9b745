use thiserror::Error;

/// Errors raised by the algebra engine.
///
/// Parse errors carry a human-readable location (`column` is 1-based) so the
/// CLI can point at the offending character of an expression.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("document error: {0}")]
    Document(String),

    #[error("mismatched coefficient monoid: {0}")]
    MonoidMismatch(String),

    #[error("negative exponent in positive mode: {0}")]
    Positivity(String),

    #[error("unknown basis class `{0}`")]
    UnknownClass(String),

    #[error("product {left} * {right} is not defined in `{ring}`")]
    UndefinedProduct {
        ring: String,
        left: String,
        right: String,
    },

    #[error("degree mismatch: {0}")]
    Degree(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no cubic relation: {0}")]
    NoCubicRelation(String),

    #[error("inconsistent ring data: {0}")]
    Inconsistent(String),

    #[error("unknown preset `{name}` (available: {available})")]
    UnknownPreset { name: String, available: String },

    #[error("missing reference row for ({manifold}, {class})")]
    MissingReferenceRow { manifold: String, class: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
