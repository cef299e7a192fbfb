use std::borrow::Cow;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::norm::Norm;
use super::prime::Prime;
use crate::error::{Error, Result};

/// An element of `Q_p` known to a finite absolute precision, or exactly.
///
/// A value is stored as `p^valuation * unit (mod p^abs_precision)` with the
/// unit coprime to `p`. Two zero states are kept apart: an exact zero, and a
/// precision-bounded zero that is only known to lie in `p^abs_precision Z_p`.
///
/// Values built from rationals (or from other exact values) additionally keep
/// the rational they came from. Arithmetic treats such values as having
/// infinite precision and re-renders their digits on demand, so combining an
/// exact `p^80` with a 64-digit value does not lose the high-order digits.
#[derive(Clone, Debug)]
pub struct PadicNumber {
    prime: Prime,
    state: State,
    exact: Option<Box<BigRational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum State {
    Zero,
    Bounded {
        abs_precision: i64,
    },
    Unit {
        valuation: i64,
        unit: BigUint,
        abs_precision: i64,
    },
}

impl PadicNumber {
    // ---------------------------------------------------------------------
    // construction
    // ---------------------------------------------------------------------

    /// The exact zero.
    pub fn zero(prime: Prime) -> Self {
        PadicNumber {
            prime,
            state: State::Zero,
            exact: None,
        }
    }

    /// A value only known to be `0 (mod p^abs_precision)`.
    pub fn bounded_zero(prime: Prime, abs_precision: i64) -> Self {
        PadicNumber {
            prime,
            state: State::Bounded { abs_precision },
            exact: None,
        }
    }

    pub fn one(prime: Prime, abs_precision: i64) -> Self {
        Self::from_integer(1, prime, abs_precision)
    }

    pub fn from_integer(n: impl Into<BigInt>, prime: Prime, abs_precision: i64) -> Self {
        Self::from_big_rational(BigRational::from_integer(n.into()), prime, abs_precision)
    }

    /// The expansion of `num/den`, rendered to `abs_precision` digits and kept exact.
    pub fn from_rational(
        num: impl Into<BigInt>,
        den: impl Into<BigInt>,
        prime: Prime,
        abs_precision: i64,
    ) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        Ok(Self::from_big_rational(
            BigRational::new(num.into(), den),
            prime,
            abs_precision,
        ))
    }

    pub fn from_big_rational(r: BigRational, prime: Prime, abs_precision: i64) -> Self {
        if r.is_zero() {
            return Self::zero(prime);
        }
        let state = render_rational(&r, prime, abs_precision);
        PadicNumber {
            prime,
            state,
            exact: Some(Box::new(r)),
        }
    }

    /// The exact power `p^k`.
    pub fn p_power(prime: Prime, k: i64, abs_precision: i64) -> Self {
        let r = if k >= 0 {
            BigRational::from_integer(BigInt::from(prime.pow(k as u64)))
        } else {
            BigRational::new(BigInt::one(), BigInt::from(prime.pow((-k) as u64)))
        };
        Self::from_big_rational(r, prime, abs_precision)
    }

    /// A value known only modulo `p^abs_precision` whose base-`p` digits,
    /// starting at position `valuation`, are `digits`.
    pub fn from_digits(
        prime: Prime,
        valuation: i64,
        digits: &[u32],
        abs_precision: i64,
    ) -> Result<Self> {
        let s = digits_to_big(prime, digits)?;
        if abs_precision < valuation + digits.len() as i64 {
            return Err(Error::domain("digit vector exceeds the stated precision"));
        }
        Ok(PadicNumber {
            prime,
            state: normalize(prime, valuation, s, abs_precision),
            exact: None,
        })
    }

    /// The finite sum `sum_i digits[i] p^(valuation + i)`, kept exact.
    pub fn from_finite_digits(
        prime: Prime,
        valuation: i64,
        digits: &[u32],
        abs_precision: i64,
    ) -> Result<Self> {
        let s = digits_to_big(prime, digits)?;
        let r = BigRational::from_integer(BigInt::from(s)) * pow_rational(prime, valuation);
        Ok(Self::from_big_rational(r, prime, abs_precision))
    }

    fn inexact(prime: Prime, state: State) -> Self {
        PadicNumber {
            prime,
            state,
            exact: None,
        }
    }

    // ---------------------------------------------------------------------
    // inspection
    // ---------------------------------------------------------------------

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// True for the exact zero and for values carrying their exact rational.
    pub fn is_exact(&self) -> bool {
        matches!(self.state, State::Zero) || self.exact.is_some()
    }

    pub fn exact_rational(&self) -> Option<BigRational> {
        match (&self.state, &self.exact) {
            (State::Zero, _) => Some(BigRational::zero()),
            (_, Some(r)) => Some((**r).clone()),
            _ => None,
        }
    }

    /// Absolute precision of the value; `None` for exact values.
    pub fn abs_precision(&self) -> Option<i64> {
        if self.is_exact() {
            None
        } else {
            Some(self.render_precision())
        }
    }

    /// Precision of the stored digit view (for exact values: how far the
    /// digits are currently rendered).
    pub fn render_precision(&self) -> i64 {
        match &self.state {
            State::Zero => i64::MAX,
            State::Bounded { abs_precision } | State::Unit { abs_precision, .. } => *abs_precision,
        }
    }

    /// Valuation when it is determined; `None` for zero of either kind.
    pub fn valuation(&self) -> Option<i64> {
        match &self.state {
            State::Zero => None,
            State::Unit { valuation, .. } => Some(*valuation),
            State::Bounded { .. } => self.exact.as_ref().map(|r| rational_valuation(r, self.prime)),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.state, State::Zero)
    }

    /// Zero to every known digit and not known to be exactly zero.
    pub fn is_bounded_zero(&self) -> bool {
        matches!(self.state, State::Bounded { .. }) && self.exact.is_none()
    }

    /// Zero at every known digit (exact zero included).
    pub fn is_zero_to_precision(&self) -> bool {
        self.is_exact_zero() || self.is_bounded_zero()
    }

    /// `|x|_p`. Fails when all known digits are zero but the value is not exactly zero.
    pub fn norm(&self) -> Result<Norm> {
        if self.is_exact_zero() {
            return Ok(Norm::Zero);
        }
        match self.valuation() {
            Some(v) => Ok(Norm::from_valuation(self.prime.get(), v)),
            None => Err(Error::precision_needed(
                self.render_precision() + 1,
                "norm of a precision-bounded zero",
            )),
        }
    }

    /// An upper bound for `|x|_p`, exact whenever `norm` succeeds.
    pub fn norm_bound(&self) -> Norm {
        match self.norm() {
            Ok(n) => n,
            Err(_) => Norm::from_valuation(self.prime.get(), self.render_precision()),
        }
    }

    /// Base-`p` digits from the valuation upward (empty for zero states).
    pub fn digits(&self) -> Vec<u32> {
        match &self.state {
            State::Unit {
                valuation,
                unit,
                abs_precision,
            } => big_to_digits(self.prime, unit, (abs_precision - valuation) as usize),
            _ => Vec::new(),
        }
    }

    /// The digit at absolute position `i`.
    pub fn digit(&self, i: i64) -> Result<u32> {
        let view = self.lifted(i + 1);
        match &view.state {
            State::Zero => Ok(0),
            State::Bounded { abs_precision } => {
                if i < *abs_precision {
                    Ok(0)
                } else {
                    Err(Error::precision_needed(i + 1, format!("digit {i}")))
                }
            }
            State::Unit {
                valuation,
                unit,
                abs_precision,
            } => {
                if i < *valuation {
                    Ok(0)
                } else if i >= *abs_precision {
                    Err(Error::precision_needed(i + 1, format!("digit {i}")))
                } else {
                    let q = unit / self.prime.pow((i - valuation) as u64);
                    Ok((q % self.prime.big()).to_u32_digits().first().copied().unwrap_or(0))
                }
            }
        }
    }

    /// Digits at absolute positions `0..n`, failing if any is unknown.
    pub fn digits_below(&self, n: i64) -> Result<Vec<u32>> {
        let out = self.known_digits_below(n);
        if (out.len() as i64) < n.max(0) {
            return Err(Error::precision_needed(
                n,
                format!("digits below {n} (known: {})", out.len()),
            ));
        }
        Ok(out)
    }

    /// Known digits at absolute positions `0..min(n, precision)`.
    pub fn known_digits_below(&self, n: i64) -> Vec<u32> {
        let view = self.lifted(n);
        let n = n.max(0);
        match &view.state {
            State::Zero => vec![0; n as usize],
            State::Bounded { abs_precision } => vec![0; n.min((*abs_precision).max(0)) as usize],
            State::Unit {
                valuation,
                unit,
                abs_precision,
            } => {
                let top = n.min(*abs_precision);
                if top <= 0 {
                    return Vec::new();
                }
                let mut out = vec![0; (*valuation).clamp(0, top) as usize];
                out.reserve(top as usize - out.len());
                if *valuation < top {
                    // digits of the unit from position max(v,0) to top
                    let start = (*valuation).max(0);
                    let shifted = unit / self.prime.pow((start - valuation) as u64);
                    out.extend(big_to_digits(self.prime, &shifted, (top - start) as usize));
                }
                out
            }
        }
    }

    /// `sum_{i<n} x_i p^i` over the nonnegative positions (exact).
    pub fn truncation_below(&self, n: i64) -> Result<PadicNumber> {
        let digits = self.digits_below(n)?;
        Self::from_finite_digits(self.prime, 0, &digits, n.max(1))
    }

    /// The fractional part `sum_{i<0} x_i p^i` (exact) and the remainder in `Z_p`.
    pub fn split_fraction(&self) -> Result<(PadicNumber, PadicNumber)> {
        match self.valuation() {
            Some(v) if v < 0 => {
                let view = self.lifted(1);
                let digits = view.digits();
                let take = ((-v) as usize).min(digits.len());
                if take < (-v) as usize {
                    return Err(Error::precision_needed(0, "fractional digits"));
                }
                let frac = Self::from_finite_digits(self.prime, v, &digits[..take], 1)?;
                let rest = self.sub(&frac)?;
                Ok((frac, rest))
            }
            _ => Ok((Self::zero(self.prime), self.clone())),
        }
    }

    /// For an exact value whose expansion terminates (an element of `N[1/p]`),
    /// its valuation and digits.
    pub fn finite_expansion(&self) -> Option<(i64, Vec<u32>)> {
        let r = self.exact_rational()?;
        if r.is_zero() {
            return Some((0, Vec::new()));
        }
        if r.is_negative() {
            return None;
        }
        let mut den = r.denom().to_biguint()?;
        let num = r.numer().to_biguint()?;
        let p = self.prime.big();
        let mut shift = 0i64;
        while (&den % &p).is_zero() {
            den /= &p;
            shift += 1;
        }
        if !den.is_one() {
            return None;
        }
        let mut digits = big_to_digits(self.prime, &num, usize::MAX);
        let mut v = -shift;
        let lead = digits.iter().take_while(|&&d| d == 0).count();
        digits.drain(..lead);
        v += lead as i64;
        Some((v, digits))
    }

    // ---------------------------------------------------------------------
    // precision management
    // ---------------------------------------------------------------------

    /// Exact values are re-rendered to at least `n` digits; others are returned as is.
    fn lifted(&self, n: i64) -> Cow<'_, PadicNumber> {
        match &self.exact {
            Some(r) if self.render_precision() < n => Cow::Owned(PadicNumber {
                prime: self.prime,
                state: render_rational(r, self.prime, n),
                exact: self.exact.clone(),
            }),
            _ => Cow::Borrowed(self),
        }
    }

    /// The value at absolute precision `n`: exact values are rendered to `n`
    /// digits, inexact ones are truncated (never extended).
    pub fn at_precision(&self, n: i64) -> PadicNumber {
        match &self.exact {
            Some(r) => PadicNumber {
                prime: self.prime,
                state: render_rational(r, self.prime, n),
                exact: self.exact.clone(),
            },
            None => self.reduce_precision(n),
        }
    }

    /// Forget digits at positions `>= n`. The result is inexact.
    pub fn reduce_precision(&self, n: i64) -> PadicNumber {
        let state = match &self.state {
            State::Zero => State::Bounded { abs_precision: n },
            State::Bounded { abs_precision } => State::Bounded {
                abs_precision: (*abs_precision).min(n),
            },
            State::Unit {
                valuation,
                unit,
                abs_precision,
            } => normalize(self.prime, *valuation, unit.clone(), (*abs_precision).min(n)),
        };
        if self.is_exact() && self.render_precision() <= n {
            // exact values stay exact when the request does not truncate
            return self.clone();
        }
        Self::inexact(self.prime, state)
    }

    /// Drop the exact tag, keeping the current digit view.
    pub fn forget_exact(&self) -> PadicNumber {
        match &self.state {
            State::Zero => self.clone(),
            s => Self::inexact(self.prime, s.clone()),
        }
    }

    // ---------------------------------------------------------------------
    // arithmetic
    // ---------------------------------------------------------------------

    fn check_prime(&self, other: &PadicNumber) -> Result<()> {
        if self.prime != other.prime {
            Err(Error::PrimeMismatch {
                left: self.prime.get(),
                right: other.prime.get(),
            })
        } else {
            Ok(())
        }
    }

    fn exact_result(&self, other: &PadicNumber, r: BigRational) -> PadicNumber {
        let n = match (&self.state, &other.state) {
            (State::Zero, _) => other.render_precision(),
            (_, State::Zero) => self.render_precision(),
            _ => self.render_precision().max(other.render_precision()),
        };
        Self::from_big_rational(r, self.prime, n)
    }

    pub fn add(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.check_prime(other)?;
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return Ok(self.exact_result(other, &**a + &**b));
        }
        let n = match (self.abs_precision(), other.abs_precision()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!(),
        };
        let a = self.lifted(n);
        let b = other.lifted(n);
        Ok(Self::inexact(self.prime, add_states(self.prime, &a.state, &b.state, n)))
    }

    pub fn neg(&self) -> PadicNumber {
        if let Some(r) = &self.exact {
            return PadicNumber {
                prime: self.prime,
                state: render_rational(&-(**r).clone(), self.prime, self.render_precision()),
                exact: Some(Box::new(-(**r).clone())),
            };
        }
        let state = match &self.state {
            State::Unit {
                valuation,
                unit,
                abs_precision,
            } => {
                let m = self.prime.pow((abs_precision - valuation) as u64);
                State::Unit {
                    valuation: *valuation,
                    unit: m - unit,
                    abs_precision: *abs_precision,
                }
            }
            s => s.clone(),
        };
        Self::inexact(self.prime, state)
    }

    pub fn sub(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.check_prime(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Self::zero(self.prime));
        }
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return Ok(self.exact_result(other, &**a * &**b));
        }
        let p = self.prime;
        let state = match (self.is_exact(), other.is_exact()) {
            (true, false) => mul_exact_inexact(p, self, &other.state),
            (false, true) => mul_exact_inexact(p, other, &self.state),
            _ => match (&self.state, &other.state) {
                (State::Bounded { abs_precision: a }, State::Bounded { abs_precision: b }) => {
                    State::Bounded {
                        abs_precision: a + b,
                    }
                }
                (State::Bounded { abs_precision }, State::Unit { valuation, .. })
                | (State::Unit { valuation, .. }, State::Bounded { abs_precision }) => {
                    State::Bounded {
                        abs_precision: abs_precision + valuation,
                    }
                }
                (
                    State::Unit {
                        valuation: va,
                        unit: ua,
                        abs_precision: na,
                    },
                    State::Unit {
                        valuation: vb,
                        unit: ub,
                        abs_precision: nb,
                    },
                ) => {
                    let rel = (na - va).min(nb - vb);
                    let m = p.pow(rel as u64);
                    State::Unit {
                        valuation: va + vb,
                        unit: (ua * ub) % m,
                        abs_precision: va + vb + rel,
                    }
                }
                _ => unreachable!(),
            },
        };
        Ok(Self::inexact(p, state))
    }

    pub fn div(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.check_prime(other)?;
        if other.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_exact_zero() {
            return Ok(Self::zero(self.prime));
        }
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return Ok(self.exact_result(other, &**a / &**b));
        }
        let p = self.prime;
        let vb = other.valuation().ok_or_else(|| {
            Error::precision_needed(
                other.render_precision() + 1,
                "division by a precision-bounded zero",
            )
        })?;
        let state = if other.is_exact() {
            // self inexact
            match &self.state {
                State::Bounded { abs_precision } => State::Bounded {
                    abs_precision: abs_precision - vb,
                },
                State::Unit {
                    valuation,
                    unit,
                    abs_precision,
                } => {
                    let rel = abs_precision - valuation;
                    let (_, ub) = other.exact_unit(rel);
                    let m = p.pow(rel as u64);
                    State::Unit {
                        valuation: valuation - vb,
                        unit: (unit * inverse_mod(&ub, &m)) % &m,
                        abs_precision: valuation - vb + rel,
                    }
                }
                State::Zero => unreachable!(),
            }
        } else {
            let (ub, relb) = match &other.state {
                State::Unit {
                    valuation,
                    unit,
                    abs_precision,
                } => (unit.clone(), abs_precision - valuation),
                _ => unreachable!(),
            };
            if self.is_exact() {
                let (va, ua) = self.exact_unit(relb);
                let m = p.pow(relb as u64);
                State::Unit {
                    valuation: va - vb,
                    unit: (ua * inverse_mod(&ub, &m)) % &m,
                    abs_precision: va - vb + relb,
                }
            } else {
                match &self.state {
                    State::Bounded { abs_precision } => State::Bounded {
                        abs_precision: abs_precision - vb,
                    },
                    State::Unit {
                        valuation,
                        unit,
                        abs_precision,
                    } => {
                        let rel = (abs_precision - valuation).min(relb);
                        let m = p.pow(rel as u64);
                        State::Unit {
                            valuation: valuation - vb,
                            unit: (unit % &m) * inverse_mod(&(ub % &m), &m) % &m,
                            abs_precision: valuation - vb + rel,
                        }
                    }
                    State::Zero => unreachable!(),
                }
            }
        };
        Ok(Self::inexact(p, state))
    }

    /// Integer power; negative exponents divide.
    pub fn powi(&self, k: i64) -> Result<PadicNumber> {
        let one = Self::one(self.prime, 1);
        if k < 0 {
            return one.div(&self.powi(-k)?);
        }
        let mut result = one;
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Multiply by the exact power `p^k`.
    pub fn shift(&self, k: i64) -> PadicNumber {
        let factor = Self::p_power(self.prime, k, 1);
        self.mul(&factor).expect("same prime")
    }

    /// `(valuation, unit mod p^rel)` of an exact nonzero value.
    fn exact_unit(&self, rel: i64) -> (i64, BigUint) {
        let r = self.exact.as_ref().expect("exact value");
        let v = rational_valuation(r, self.prime);
        match render_rational(r, self.prime, v + rel) {
            State::Unit {
                valuation, unit, ..
            } => (valuation, unit),
            _ => unreachable!("nonzero rational renders to a unit"),
        }
    }

    // ---------------------------------------------------------------------
    // comparison
    // ---------------------------------------------------------------------

    /// Equality on all digits both values know.
    pub fn agrees_with(&self, other: &PadicNumber) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_zero_to_precision(),
            Err(_) => false,
        }
    }

    /// Exact equality, defined only when both values are exact.
    pub fn exact_eq(&self, other: &PadicNumber) -> Option<bool> {
        if self.prime != other.prime {
            return Some(false);
        }
        Some(self.exact_rational()? == other.exact_rational()?)
    }

    /// Identical digit views and exactness (structural equality).
    pub fn same_representation(&self, other: &PadicNumber) -> bool {
        self.prime == other.prime && self.state == other.state && self.exact == other.exact
    }

    pub fn is_integral(&self) -> bool {
        match self.valuation() {
            Some(v) => v >= 0,
            None => self.is_exact_zero() || self.render_precision() >= 0,
        }
    }

    /// The stored `(valuation, unit, abs_precision)` triple of a unit state.
    pub fn raw_unit(&self) -> Option<(i64, &BigUint, i64)> {
        match &self.state {
            State::Unit {
                valuation,
                unit,
                abs_precision,
            } => Some((*valuation, unit, *abs_precision)),
            _ => None,
        }
    }
}

impl fmt::Display for PadicNumber {
    /// `d0 d1 d2 ... * p^v (mod p^N)`; `0 (mod p^N)` for a bounded zero and
    /// `0` for the exact zero. Exact terminating values omit the modulus.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        if let Some((v, digits)) = self.finite_expansion() {
            let body: Vec<String> = digits.iter().map(u32::to_string).collect();
            return write!(f, "{} * p^{v}", body.join(" "));
        }
        match &self.state {
            State::Bounded { abs_precision } => write!(f, "0 (mod p^{abs_precision})"),
            State::Unit {
                valuation,
                abs_precision,
                ..
            } => {
                let body: Vec<String> = self.digits().iter().map(u32::to_string).collect();
                write!(f, "{} * p^{valuation} (mod p^{abs_precision})", body.join(" "))
            }
            State::Zero => unreachable!(),
        }
    }
}

// -------------------------------------------------------------------------
// helpers
// -------------------------------------------------------------------------

fn pow_rational(prime: Prime, k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from_integer(BigInt::from(prime.pow(k as u64)))
    } else {
        BigRational::new(BigInt::one(), BigInt::from(prime.pow((-k) as u64)))
    }
}

/// `(v, n / p^v)` with `v = ord_p(n)`, for `n != 0`. Strips `p^(2^j)` for
/// growing `j`, then descends, so large valuations cost `O(log v)` divisions.
fn ord_big(n: &BigInt, prime: Prime) -> (i64, BigInt) {
    if n.is_zero() {
        return (0, n.clone());
    }
    if prime.get() == 2 {
        let t = n.trailing_zeros().expect("nonzero");
        return (t as i64, n >> t);
    }
    let mut n = n.clone();
    let mut v = 0i64;
    let mut powers = vec![(BigInt::from(prime.get()), 1i64)];
    loop {
        let (pw, e) = powers.last().expect("nonempty").clone();
        let (q, r) = n.div_rem(&pw);
        if !r.is_zero() {
            break;
        }
        n = q;
        v += e;
        powers.push((&pw * &pw, 2 * e));
    }
    while let Some((pw, e)) = powers.pop() {
        let (q, r) = n.div_rem(&pw);
        if r.is_zero() {
            n = q;
            v += e;
        }
    }
    (v, n)
}

fn rational_valuation(r: &BigRational, prime: Prime) -> i64 {
    ord_big(r.numer(), prime).0 - ord_big(r.denom(), prime).0
}

fn render_rational(r: &BigRational, prime: Prime, abs_precision: i64) -> State {
    if r.is_zero() {
        return State::Zero;
    }
    let (a, num) = ord_big(r.numer(), prime);
    let (b, den) = ord_big(r.denom(), prime);
    let v = a - b;
    if abs_precision <= v {
        return State::Bounded { abs_precision };
    }
    let rel = (abs_precision - v) as u64;
    let m = BigInt::from(prime.pow(rel));
    let num = num.mod_floor(&m).to_biguint().expect("nonnegative");
    let den = den.mod_floor(&m).to_biguint().expect("nonnegative");
    let m = m.to_biguint().expect("positive");
    State::Unit {
        valuation: v,
        unit: (num * inverse_mod(&den, &m)) % m,
        abs_precision,
    }
}

fn inverse_mod(u: &BigUint, m: &BigUint) -> BigUint {
    if m.is_one() {
        return BigUint::zero();
    }
    u.modinv(m).expect("unit is invertible modulo p^k")
}

/// Bring `p^valuation * s` into canonical form modulo `p^abs_precision`.
fn normalize(prime: Prime, valuation: i64, s: BigUint, abs_precision: i64) -> State {
    if abs_precision <= valuation {
        return State::Bounded { abs_precision };
    }
    let m = prime.pow((abs_precision - valuation) as u64);
    let mut s = s % m;
    if s.is_zero() {
        return State::Bounded { abs_precision };
    }
    let p = prime.big();
    let mut v = valuation;
    loop {
        let (q, r) = s.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        s = q;
        v += 1;
    }
    State::Unit {
        valuation: v,
        unit: s,
        abs_precision,
    }
}

fn add_states(prime: Prime, a: &State, b: &State, n: i64) -> State {
    let mut terms: Vec<(i64, &BigUint)> = Vec::with_capacity(2);
    for s in [a, b] {
        if let State::Unit {
            valuation, unit, ..
        } = s
        {
            terms.push((*valuation, unit));
        }
    }
    let Some(v0) = terms.iter().map(|t| t.0).min() else {
        return State::Bounded { abs_precision: n };
    };
    if v0 >= n {
        return State::Bounded { abs_precision: n };
    }
    let mut s = BigUint::zero();
    for (v, u) in terms {
        if v < n {
            s += u * prime.pow((v - v0) as u64);
        }
    }
    normalize(prime, v0, s, n)
}

fn mul_exact_inexact(p: Prime, exact: &PadicNumber, other: &State) -> State {
    let ve = exact.valuation().expect("nonzero exact value");
    match other {
        State::Bounded { abs_precision } => State::Bounded {
            abs_precision: abs_precision + ve,
        },
        State::Unit {
            valuation,
            unit,
            abs_precision,
        } => {
            let rel = abs_precision - valuation;
            let (_, ue) = exact.exact_unit(rel);
            let m = p.pow(rel as u64);
            State::Unit {
                valuation: valuation + ve,
                unit: (unit * ue) % m,
                abs_precision: valuation + ve + rel,
            }
        }
        State::Zero => State::Zero,
    }
}

fn digits_to_big(prime: Prime, digits: &[u32]) -> Result<BigUint> {
    let p = prime.get();
    let mut s = BigUint::zero();
    for &d in digits.iter().rev() {
        if d >= p {
            return Err(Error::domain(format!("digit {d} out of range for p = {p}")));
        }
        s = s * p + d;
    }
    Ok(s)
}

/// Little-endian base-`p` digits, padded with zeros to `len` (when `len` is finite).
pub(crate) fn big_to_digits(prime: Prime, n: &BigUint, len: usize) -> Vec<u32> {
    let p = prime.get();
    let mut out: Vec<u32> = if p <= 256 {
        n.to_radix_le(p).into_iter().map(u32::from).collect()
    } else {
        let mut out = Vec::new();
        let mut n = n.clone();
        let pb = BigUint::from(p);
        while !n.is_zero() {
            let (q, r) = n.div_rem(&pb);
            out.push(r.to_u32_digits().first().copied().unwrap_or(0));
            n = q;
        }
        out
    };
    if n.is_zero() {
        out.clear();
    }
    if len != usize::MAX {
        out.resize(len, 0);
    }
    out
}
