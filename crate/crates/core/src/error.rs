use thiserror::Error;

/// Errors raised by p-adic arithmetic and everything built on top of it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u32, right: u32 },

    #[error("division by exact zero")]
    DivisionByZero,

    /// The digits needed to decide the result are not known. `needed` is the
    /// absolute input precision that would resolve it, when that is computable.
    #[error("insufficient precision: {context}{}", needed.map(|n| format!(" (need precision {n})")).unwrap_or_default())]
    InsufficientPrecision { needed: Option<i64>, context: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("not differentiable at the requested point")]
    NotDifferentiable,
}

impl Error {
    pub(crate) fn precision_needed(needed: i64, context: impl Into<String>) -> Self {
        Error::InsufficientPrecision {
            needed: Some(needed),
            context: context.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn is_insufficient_precision(&self) -> bool {
        matches!(self, Error::InsufficientPrecision { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
