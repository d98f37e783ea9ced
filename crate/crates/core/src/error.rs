use alloc::string::String;

/// Errors produced by the core routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("degenerate matrix: {0}")]
    Degenerate(&'static str),
    #[error("unknown transform `{name}` (available: {available})")]
    NotFound { name: String, available: String },
    #[error("infeasible sequence: no nonzero candidate orthogonal to the placed rows for row {row}")]
    Infeasible { row: usize },
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("circular mean undefined: cosine and sine sums are both zero")]
    UndefinedMean,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = core::result::Result<T, Error>;
