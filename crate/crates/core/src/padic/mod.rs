//! Exact arithmetic in `Q_p` with digit-level precision tracking.

mod binomial;
mod norm;
mod number;
mod prime;
pub mod text;

pub use binomial::pow_one_plus;
pub use norm::Norm;
pub use number::PadicNumber;
pub use prime::Prime;

pub(crate) use number::big_to_digits;

/// Default working precision in digits.
pub const DEFAULT_PRECISION: i64 = 64;

/// `|x|_p`; an error for a precision-bounded zero.
pub fn abs_value(x: &PadicNumber) -> crate::Result<Norm> {
    x.norm()
}
