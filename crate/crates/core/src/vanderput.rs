//! The van der Put basis of `C(Z_p, Q_p)` and its coefficient criteria.
//!
//! `e_0 = 1`, and for `n >= 1`, `e_n` is the indicator of the ball of points
//! agreeing with `n` on all `s + 1` base-`p` digits of `n` (`s = floor(log_p n)`).
//! A continuous `f` expands as `sum a_n e_n` with `a_0 = f(0)` and
//! `a_n = f(n) - f(n_)`, where `n_` is `n` with its leading digit removed.
//!
//! Norm products such as `|a_n| n^alpha` are carried as natural logarithms so
//! that indices far beyond `f64` range (e.g. `2^10000`) stay usable.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{big_to_digits, Norm, PadicNumber, Prime};
use crate::quotient::SharedFn;

/// Number of base-`p` digits of `n` (0 for `n = 0`).
pub fn digit_length(prime: Prime, n: &BigUint) -> usize {
    if n.is_zero() {
        0
    } else {
        big_to_digits(prime, n, usize::MAX).len()
    }
}

/// `n` with its most significant base-`p` digit removed.
pub fn drop_leading_digit(prime: Prime, n: &BigUint) -> BigUint {
    let len = digit_length(prime, n);
    if len == 0 {
        return BigUint::zero();
    }
    n % prime.pow(len as u64 - 1)
}

/// `ln n` for arbitrarily large `n` (`-inf` for 0).
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `e_n(x)`. Needs the digits of `x` below the digit length of `n`, unless a
/// known digit already differs.
pub fn basis_eval(n: &BigUint, x: &PadicNumber) -> Result<bool> {
    if n.is_zero() {
        return Ok(true);
    }
    if !x.is_integral() {
        return Err(Error::domain(format!("{x} is not in Z_p")));
    }
    let prime = x.prime();
    let len = digit_length(prime, n);
    let want = big_to_digits(prime, n, len);
    let known = x.known_digits_below(len as i64);
    if known.iter().zip(&want).any(|(a, b)| a != b) {
        return Ok(false);
    }
    if known.len() < len {
        return Err(Error::precision_needed(
            len as i64,
            format!("membership in the van der Put ball of {n}"),
        ));
    }
    Ok(true)
}

/// Coefficients `a_n` of a function on `Z_p`, computed on demand and cached.
pub struct VdPSeries {
    f: SharedFn,
    prime: Prime,
    precision: i64,
    cache: RefCell<HashMap<BigUint, PadicNumber>>,
}

impl VdPSeries {
    /// `precision` is the absolute precision used to represent the integer
    /// inputs `n` (they stay exact; this only bounds rendering).
    pub fn new(f: SharedFn, prime: Prime, precision: i64) -> Self {
        VdPSeries {
            f,
            prime,
            precision,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    fn at(&self, n: &BigUint) -> Result<PadicNumber> {
        let x = PadicNumber::from_integer(num_bigint::BigInt::from(n.clone()), self.prime, self.precision);
        self.f.eval(&x)
    }

    pub fn coefficient(&self, n: &BigUint) -> Result<PadicNumber> {
        if let Some(a) = self.cache.borrow().get(n) {
            return Ok(a.clone());
        }
        let a = if n.is_zero() {
            self.at(n)?
        } else {
            self.at(n)?.sub(&self.at(&drop_leading_digit(self.prime, n))?)?
        };
        self.cache.borrow_mut().insert(n.clone(), a.clone());
        Ok(a)
    }

    pub fn coeff(&self, n: u64) -> Result<PadicNumber> {
        self.coefficient(&BigUint::from(n))
    }

    /// `|a_n|`, an exact power of `p` or 0.
    pub fn norm(&self, n: &BigUint) -> Result<Norm> {
        self.coefficient(n)?.norm()
    }

    /// `sum_{n <= n_max} a_n e_n(x)`.
    pub fn partial_sum(&self, n_max: u64, x: &PadicNumber) -> Result<PadicNumber> {
        let mut acc = PadicNumber::zero(self.prime);
        for n in 0..=n_max {
            let n = BigUint::from(n);
            if basis_eval(&n, x)? {
                acc = acc.add(&self.coefficient(&n)?)?;
            }
        }
        Ok(acc)
    }
}

/// Series of `f` with `a_0 ..= a_{n_max}` computed eagerly.
pub fn decompose(f: SharedFn, prime: Prime, precision: i64, n_max: u64) -> Result<VdPSeries> {
    let s = VdPSeries::new(f, prime, precision);
    for n in 0..=n_max {
        s.coeff(n)?;
    }
    Ok(s)
}

// -------------------------------------------------------------------------
// criteria
// -------------------------------------------------------------------------

/// One coefficient with its weighted norms, all as natural logs (`None` = 0).
#[derive(Clone, Debug, Serialize)]
pub struct CriterionRow {
    #[serde(serialize_with = "ser_big")]
    pub n: BigUint,
    pub coeff_norm: Norm,
    pub ln_abs: Option<f64>,
    /// `ln(|a_n| n)`
    pub ln_times_n: Option<f64>,
    /// `ln(|a_n| n^alpha)`
    pub ln_times_n_alpha: Option<f64>,
    /// running supremum of `ln(|a_k| k^alpha)` over the rows so far
    pub ln_running_sup: Option<f64>,
}

fn ser_big<S: serde::Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(n)
}

/// Rows for the given indices, with running suprema of `|a_n| n^alpha`.
pub fn weighted_rows<I>(series: &VdPSeries, indices: I, alpha: f64) -> Result<Vec<CriterionRow>>
where
    I: IntoIterator<Item = BigUint>,
{
    let mut sup: Option<f64> = None;
    let mut rows = Vec::new();
    for n in indices {
        let coeff_norm = series.norm(&n)?;
        let ln_abs = (!coeff_norm.is_zero()).then(|| coeff_norm.ln());
        let ln_n = ln_big(&n);
        let ln_times_n = ln_abs.filter(|_| !n.is_zero()).map(|a| a + ln_n);
        let ln_times_n_alpha = ln_abs.filter(|_| !n.is_zero()).map(|a| a + alpha * ln_n);
        if let Some(v) = ln_times_n_alpha {
            sup = Some(sup.map_or(v, |s: f64| s.max(v)));
        }
        rows.push(CriterionRow {
            n,
            coeff_norm,
            ln_abs,
            ln_times_n,
            ln_times_n_alpha,
            ln_running_sup: sup,
        });
    }
    Ok(rows)
}

/// Maximum of `|a_n| n` over the window `[start, end]`.
#[derive(Clone, Debug, Serialize)]
pub struct WindowMax {
    pub start: u64,
    pub end: u64,
    pub max: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct N1Report {
    pub windows: Vec<WindowMax>,
    /// Everything is zero, or the last complete window's maximum lies strictly
    /// below the maximum over the earlier complete windows.
    pub decaying: bool,
}

/// Windowed maxima of `|a_n| n` over dyadic windows `[2^i, 2^{i+1})` up to `n_max`.
pub fn n1_criterion(series: &VdPSeries, n_max: u64) -> Result<N1Report> {
    let rows = weighted_rows(series, (1..=n_max).map(BigUint::from), 1.0)?;
    let mut windows: Vec<WindowMax> = Vec::new();
    let mut start = 1u64;
    while start <= n_max {
        let end = (start.saturating_mul(2) - 1).min(n_max);
        let max = rows[(start - 1) as usize..end as usize]
            .iter()
            .filter_map(|r| r.ln_times_n)
            .map(f64::exp)
            .fold(0.0, f64::max);
        windows.push(WindowMax { start, end, max });
        start = end + 1;
    }
    // Judge the trend on complete windows only; a clipped last window would
    // compare a handful of indices against a full range.
    let complete: Vec<f64> = windows
        .iter()
        .filter(|w| w.end == 2 * w.start - 1)
        .map(|w| w.max)
        .collect();
    let all_zero = windows.iter().all(|w| w.max == 0.0);
    let decaying = all_zero
        || match complete.split_last() {
            Some((last, earlier)) if !earlier.is_empty() => {
                *last < earlier.iter().copied().fold(0.0, f64::max)
            }
            _ => false,
        };
    Ok(N1Report { windows, decaying })
}

#[derive(Clone, Debug, Serialize)]
pub struct LipReport {
    pub alpha: f64,
    pub rows: Vec<CriterionRow>,
    /// `ln sup |a_n| n^alpha` over the prefix; `None` when all coefficients vanish.
    pub ln_sup: Option<f64>,
}

impl LipReport {
    pub fn sup(&self) -> f64 {
        self.ln_sup.map_or(0.0, f64::exp)
    }
}

/// Running suprema of `|a_n| n^alpha` for `1 <= n <= n_max`.
pub fn lip_criterion(series: &VdPSeries, alpha: f64, n_max: u64) -> Result<LipReport> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::domain("alpha must be positive"));
    }
    let rows = weighted_rows(series, (1..=n_max).map(BigUint::from), alpha)?;
    let ln_sup = rows.last().and_then(|r| r.ln_running_sup);
    Ok(LipReport {
        alpha,
        rows,
        ln_sup,
    })
}

/// A positive real given by its natural log, rendered in decimal scientific
/// notation without going through `f64` range.
pub fn format_ln(ln: Option<f64>) -> String {
    let Some(ln) = ln else {
        return "0".into();
    };
    let log10 = ln / std::f64::consts::LN_10;
    if log10.abs() < 15.0 {
        return format!("{:.6e}", ln.exp());
    }
    let exp = log10.floor();
    let mantissa = 10f64.powf(log10 - exp);
    format!("{mantissa:.6}e{exp}")
}

/// CSV header for [`csv_row`].
pub const CSV_HEADER: &str = "n,abs_a,abs_a_decimal,abs_a_times_n,abs_a_times_n_alpha,running_sup";

pub fn csv_row(row: &CriterionRow) -> String {
    format!(
        "{},{},{},{},{},{}",
        row.n,
        row.coeff_norm,
        format_ln(row.ln_abs),
        format_ln(row.ln_times_n),
        format_ln(row.ln_times_n_alpha),
        format_ln(row.ln_running_sup)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::{constant, linear};

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn leading_digit_removal() {
        assert_eq!(drop_leading_digit(p(10 - 3), &big(7 * 7 + 3)), big(3));
        assert_eq!(drop_leading_digit(p(2), &big(0b1011)), big(0b011));
        assert_eq!(drop_leading_digit(p(5), &big(4)), big(0));
        assert_eq!(digit_length(p(3), &big(9)), 3);
    }

    #[test]
    fn e3_for_p2_is_three_mod_four() {
        let prime = p(2);
        for x in 0..8i64 {
            let px = PadicNumber::from_integer(x, prime, 8);
            assert_eq!(basis_eval(&big(3), &px).unwrap(), x % 4 == 3, "x = {x}");
        }
    }

    #[test]
    fn basis_needs_digits_only_when_undecided() {
        let prime = p(3);
        let x = PadicNumber::from_digits(prime, 0, &[2], 1).unwrap();
        // n = 5 = [2, 1]: digit 0 agrees, digit 1 unknown
        assert!(basis_eval(&big(5), &x).unwrap_err().is_insufficient_precision());
        // n = 4 = [1, 1]: digit 0 already differs
        assert!(!basis_eval(&big(4), &x).unwrap());
        assert!(basis_eval(&big(0), &x).unwrap());
    }

    #[test]
    fn ln_big_matches_f64_and_scales() {
        assert!((ln_big(&big(1000)) - 1000f64.ln()).abs() < 1e-12);
        let huge = BigUint::from(1u8) << 5000u32;
        assert!((ln_big(&huge) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn constant_function_has_only_a0() {
        let prime = p(3);
        let c = PadicNumber::from_integer(4, prime, 16);
        let s = decompose(constant(c.clone()), prime, 16, 30).unwrap();
        assert!(s.coeff(0).unwrap().exact_eq(&c).unwrap());
        assert!((1..=30).all(|n| s.coeff(n).unwrap().is_exact_zero()));
    }

    #[test]
    fn format_ln_handles_huge_and_zero() {
        assert_eq!(format_ln(None), "0");
        assert_eq!(format_ln(Some(0.0)), "1.000000e0");
        let s = format_ln(Some(10000.0 * std::f64::consts::LN_10));
        assert!(s.ends_with("e10000"), "{s}");
    }

    #[test]
    fn identity_fails_the_n1_trend() {
        let prime = p(2);
        let s = VdPSeries::new(linear(PadicNumber::one(prime, 8)), prime, 32);
        let report = n1_criterion(&s, 1 << 10).unwrap();
        assert!(!report.decaying);
        assert!(report.windows.iter().all(|w| w.max >= 1.0));
    }
}
