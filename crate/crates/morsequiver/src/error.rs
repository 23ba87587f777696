use thiserror::Error;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("non-manifold link at vertex {vertex}: {msg}")]
    NonManifold { vertex: u32, msg: String },
    #[error("classification failed: {0}")]
    Classification(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("levelling condition ({condition}) violated: {msg}")]
    Levelling { condition: &'static str, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
