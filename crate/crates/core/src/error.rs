use thiserror::Error;

/// Errors raised by construction, evaluation and verification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("index ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    Bounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("resource limit exceeded: {what} needs {required}, limit is {limit}")]
    Resource {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("verification failed in {check}: {detail}")]
    Verification { check: &'static str, detail: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
