use thiserror::Error;

/// Errors produced by the space, comparison-function and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Inputs outside the domain of an operation (mismatched point kinds,
    /// invalid parameters, out-of-range indices).
    #[error("domain error: {0}")]
    Domain(String),

    /// A distance or iterate evaluated to a non-finite value.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A set of triples admits no relaxation parameters at all.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A search (for `q`, for the invariant-ball index `p`, ...) ran past its cap.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    /// An orbit or a series failed to converge.
    #[error("divergence: {0}")]
    Divergence(String),

    /// A check was refused because its precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Malformed expression source; `column` is 1-based.
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
