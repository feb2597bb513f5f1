use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Argument outside the domain of a function (ln of a nonpositive number, f outside [0,B], ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("division by an interval containing zero")]
    DivisionByZero,

    /// The enumerator has not discovered enough elements; the caller must advance it.
    #[error("insufficient enumeration: requested {requested} elements, {available} discovered")]
    InsufficientEnumeration { requested: usize, available: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A certified precondition could not be established (e.g. P not provably above P_*).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A user-supplied approximation handle failed.
    #[error("approximation handle failed at index {index}: {message}")]
    Handle { index: u64, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
