//! Text form of p-adic numbers: `d0 d1 d2 ... * p^v (mod p^N)`.
//!
//! Parsing also accepts the exact forms produced by `Display` (no modulus),
//! `0`, `0 (mod p^N)`, and small rational expressions such as `p^2 + 3*p^5`
//! or `1/(1-p)`, which are kept exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::number::PadicNumber;
use super::prime::Prime;
use crate::error::{Error, Result};

pub fn parse(text: &str, prime: Prime, default_precision: i64) -> Result<PadicNumber> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    if let Some(idx) = s.find("(mod") {
        let body = s[..idx].trim();
        let modulus = s[idx + 4..]
            .trim()
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse("unterminated modulus".into()))?;
        let n = parse_power(modulus.trim(), prime)?;
        if body == "0" {
            return Ok(PadicNumber::bounded_zero(prime, n));
        }
        let (v, digits) = parse_digit_body(body, prime)?
            .ok_or_else(|| Error::Parse(format!("expected `digits * p^v`, got `{body}`")))?;
        return PadicNumber::from_digits(prime, v, &digits, n).map_err(|e| Error::Parse(e.to_string()));
    }
    if let Some((v, digits)) = parse_digit_body(s, prime)? {
        return PadicNumber::from_finite_digits(prime, v, &digits, default_precision.max(v + digits.len() as i64));
    }
    let r = Expr::new(s, prime).parse()?;
    Ok(PadicNumber::from_big_rational(r, prime, default_precision))
}

/// `p^k` or `<prime>^k` -> `k`.
fn parse_power(s: &str, prime: Prime) -> Result<i64> {
    let (base, exp) = s
        .split_once('^')
        .ok_or_else(|| Error::Parse(format!("expected p^k, got `{s}`")))?;
    check_base(base.trim(), prime)?;
    exp.trim()
        .parse::<i64>()
        .map_err(|_| Error::Parse(format!("bad exponent `{exp}`")))
}

fn check_base(base: &str, prime: Prime) -> Result<()> {
    if base == "p" || base.parse::<u64>().ok() == Some(prime.get() as u64) {
        Ok(())
    } else {
        Err(Error::Parse(format!("base `{base}` does not match p = {prime}")))
    }
}

/// `d0 d1 ... * p^v` with at least two digit tokens, or a single digit below p.
fn parse_digit_body(s: &str, prime: Prime) -> Result<Option<(i64, Vec<u32>)>> {
    let Some((left, right)) = s.split_once('*') else {
        return Ok(None);
    };
    let tokens: Vec<&str> = left.split_whitespace().collect();
    if tokens.is_empty() || !tokens.iter().all(|t| t.chars().all(|c| c.is_ascii_digit())) {
        return Ok(None);
    }
    let Ok(v) = parse_power(right.trim(), prime) else {
        return Ok(None);
    };
    let digits: Vec<u32> = tokens
        .iter()
        .map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad digit `{t}`"))))
        .collect::<Result<_>>()?;
    if digits.iter().any(|&d| d >= prime.get()) {
        if tokens.len() == 1 {
            return Ok(None); // let the expression parser read it as a coefficient
        }
        return Err(Error::Parse(format!("digit out of range for p = {prime}")));
    }
    Ok(Some((v, digits)))
}

struct Expr<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    prime: Prime,
}

impl<'a> Expr<'a> {
    fn new(s: &'a str, prime: Prime) -> Self {
        Expr {
            chars: s.chars().peekable(),
            prime,
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().copied()
    }

    fn parse(mut self) -> Result<BigRational> {
        let v = self.expr()?;
        match self.peek() {
            None => Ok(v),
            Some(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
        }
    }

    fn expr(&mut self) -> Result<BigRational> {
        let mut acc = if self.peek() == Some('-') {
            self.chars.next();
            -self.term()?
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.chars.next();
                    acc += self.term()?;
                }
                Some('-') => {
                    self.chars.next();
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<BigRational> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.chars.next();
                    acc *= self.power()?;
                }
                Some('/') => {
                    self.chars.next();
                    let d = self.power()?;
                    if d.is_zero() {
                        return Err(Error::Parse("division by zero".into()));
                    }
                    acc /= d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<BigRational> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.chars.next();
        let neg = if self.peek() == Some('-') {
            self.chars.next();
            true
        } else {
            false
        };
        let e = self.number()?;
        let e: i32 = e
            .try_into()
            .map_err(|_| Error::Parse("exponent too large".into()))?;
        if base.is_zero() && neg {
            return Err(Error::Parse("negative power of zero".into()));
        }
        let r = num_traits::pow::Pow::pow(&base, e as u32);
        Ok(if neg { BigRational::one() / r } else { r })
    }

    fn atom(&mut self) -> Result<BigRational> {
        match self.peek() {
            Some('p') => {
                self.chars.next();
                Ok(BigRational::from_integer(BigInt::from(self.prime.get())))
            }
            Some('(') => {
                self.chars.next();
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                self.chars.next();
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => Ok(BigRational::from_integer(BigInt::from(self.number()?))),
            Some(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        s.parse::<u64>()
            .map_err(|_| Error::Parse(format!("expected a number, got `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    #[test]
    fn renders_and_parses_inexact() {
        let x = PadicNumber::from_digits(p5(), -1, &[2, 0, 4, 1], 5).unwrap();
        let s = x.to_string();
        assert_eq!(s, "2 0 4 1 0 0 * p^-1 (mod p^5)");
        let y = parse(&s, p5(), 64).unwrap();
        assert!(y.same_representation(&x));
    }

    #[test]
    fn renders_exact_terminating_values_without_modulus() {
        let x = PadicNumber::from_integer(5 * 5 * 5 * 5, p5(), 64);
        assert_eq!(x.to_string(), "1 * p^4");
        let y = parse("1 * p^4", p5(), 64).unwrap();
        assert_eq!(y.exact_eq(&x), Some(true));
        assert_eq!(parse("1 * 5^4", p5(), 64).unwrap().exact_eq(&x), Some(true));
    }

    #[test]
    fn zeros() {
        assert!(parse("0", p5(), 10).unwrap().is_exact_zero());
        let z = parse("0 (mod p^7)", p5(), 10).unwrap();
        assert!(z.is_bounded_zero());
        assert_eq!(z.render_precision(), 7);
        assert_eq!(z.to_string(), "0 (mod p^7)");
    }

    #[test]
    fn expressions() {
        let p = p5();
        let x = parse("p^2", p, 64).unwrap();
        assert_eq!(x.exact_eq(&PadicNumber::from_integer(25, p, 64)), Some(true));
        let y = parse("1/(1-p)", p, 12).unwrap();
        assert_eq!(y.digits(), vec![1; 12]);
        let z = parse("3*p^-2 + 7/2 - p", p, 12).unwrap();
        let want = PadicNumber::from_rational(3 * 2 + 7 * 25 - 2 * 125, 50, p, 12).unwrap();
        assert_eq!(z.exact_eq(&want), Some(true));
        assert_eq!(parse("12 * p^2", p, 64).unwrap().exact_eq(&PadicNumber::from_integer(300, p, 64)), Some(true));
    }

    #[test]
    fn malformed_input() {
        for s in ["", "p^", "1 2 * q^3", "(1+p", "1/0", "1 9 * p^0", "2 * p^1 (mod 3^4)", "abc"] {
            assert!(matches!(parse(s, p5(), 10), Err(Error::Parse(_))), "{s}");
        }
    }
}
