use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::number::PadicNumber;
use crate::error::{Error, Result};

/// `(1 + y)^alpha` for `y` in `pZ_p` and `alpha` in `Z_p`, as the binomial series
/// `sum_i C(alpha, i) y^i`, to absolute precision `abs_precision`.
///
/// Term `i` has norm at most `p^-i`, so the first `abs_precision` terms decide
/// the result. The running product `alpha (alpha - 1) ... / i!` loses
/// `ord_p(i!)` digits to the divisions, so `alpha` and `y` are taken with that
/// much extra precision when they are exact. The returned precision is the
/// tracked one, capped at `abs_precision`.
pub fn pow_one_plus(y: &PadicNumber, alpha: &PadicNumber, abs_precision: i64) -> Result<PadicNumber> {
    let prime = y.prime();
    if alpha.prime() != prime {
        return Err(Error::PrimeMismatch {
            left: prime.get(),
            right: alpha.prime().get(),
        });
    }
    if abs_precision < 1 {
        return Err(Error::domain("precision must be positive"));
    }
    match y.valuation() {
        Some(v) if v < 1 => return Err(Error::domain("(1+y)^alpha needs |y|_p <= 1/p")),
        None if !y.is_exact_zero() && y.render_precision() < 1 => {
            return Err(Error::precision_needed(1, "cannot tell whether y lies in pZ_p"))
        }
        _ => {}
    }
    if !alpha.is_integral() {
        return Err(Error::domain("(1+y)^alpha needs alpha in Z_p"));
    }

    if y.is_exact_zero() || alpha.is_exact_zero() {
        return Ok(PadicNumber::one(prime, abs_precision));
    }
    // small integer exponents of exact bases stay exact
    if let (true, Some(r)) = (y.is_exact(), alpha.exact_rational()) {
        if r.is_integer() {
            if let Some(k) = r.to_integer().to_i64().filter(|k| k.abs() <= 64) {
                let base = PadicNumber::one(prime, abs_precision).add(y)?;
                return Ok(base.powi(k)?.at_precision(abs_precision));
            }
        }
    }

    let pad = prime.ord_factorial(abs_precision as u64) as i64 + 2;
    let work = abs_precision + pad;
    let y = y.at_precision(work);
    let alpha = alpha.at_precision(work);

    let mut sum = PadicNumber::one(prime, work);
    let mut term = PadicNumber::one(prime, work);
    for i in 1..abs_precision {
        let factor = alpha.sub(&PadicNumber::from_integer(BigInt::from(i - 1), prime, work))?;
        term = term
            .mul(&factor)?
            .mul(&y)?
            .div(&PadicNumber::from_integer(BigInt::from(i), prime, work))?;
        sum = sum.add(&term)?;
    }
    Ok(sum.reduce_precision(abs_precision))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Prime;

    #[test]
    fn zero_exponent_gives_one() {
        let p = Prime::new(5).unwrap();
        let y = PadicNumber::from_digits(p, 1, &[3, 4, 1], 4).unwrap();
        let r = pow_one_plus(&y, &PadicNumber::zero(p), 20).unwrap();
        assert!(r.agrees_with(&PadicNumber::one(p, 20)));
    }

    #[test]
    fn first_power_is_identity() {
        let p = Prime::new(7).unwrap();
        let y = PadicNumber::p_power(p, 1, 30);
        let r = pow_one_plus(&y, &PadicNumber::one(p, 30), 30).unwrap();
        assert_eq!(r.exact_eq(&PadicNumber::from_integer(8, p, 30)), Some(true));
    }

    #[test]
    fn series_matches_integer_power() {
        // inexact exponent 3 against exact (1+y)^3
        let p = Prime::new(3).unwrap();
        let y = PadicNumber::from_integer(6, p, 40);
        let three = PadicNumber::from_digits(p, 0, &[0, 1], 40).unwrap();
        let series = pow_one_plus(&y, &three, 40).unwrap();
        assert_eq!(series.abs_precision(), Some(40));
        assert!(series.agrees_with(&PadicNumber::from_integer(343, p, 40)));
    }

    #[test]
    fn half_power_squares_back() {
        let p = Prime::new(5).unwrap();
        let y = PadicNumber::from_integer(5, p, 30);
        let half = PadicNumber::from_rational(1, 2, p, 40).unwrap();
        let r = pow_one_plus(&y, &half, 30).unwrap();
        assert!(r.mul(&r).unwrap().agrees_with(&PadicNumber::from_integer(6, p, 30)));
        assert_eq!(r.digit(0).unwrap(), 1);
    }

    #[test]
    fn rejects_units_and_fractional_exponents() {
        let p = Prime::new(3).unwrap();
        let one = PadicNumber::one(p, 10);
        assert!(matches!(pow_one_plus(&one, &one, 10), Err(Error::Domain(_))));
        let y = PadicNumber::from_integer(3, p, 10);
        let frac = PadicNumber::from_rational(1, 3, p, 10).unwrap();
        assert!(matches!(pow_one_plus(&y, &frac, 10), Err(Error::Domain(_))));
    }
}
