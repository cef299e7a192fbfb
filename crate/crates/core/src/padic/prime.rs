use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime number, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(value: u64) -> Result<Self> {
        if value < 2 || value > u32::MAX as u64 || !is_prime(value) {
            return Err(Error::NotPrime(value));
        }
        Ok(Prime(value as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    pub fn big(self) -> BigUint {
        BigUint::from(self.0)
    }

    /// `p^k` as a big integer.
    pub fn pow(self, k: u64) -> BigUint {
        let k = u32::try_from(k).expect("exponent too large");
        self.big().pow(k)
    }

    /// Natural logarithm of `p`.
    pub fn ln(self) -> f64 {
        (self.0 as f64).ln()
    }

    /// `ord_p(n)` for a nonzero machine integer.
    pub fn ord(self, mut n: u64) -> u32 {
        assert!(n != 0, "ord_p(0) is infinite");
        let p = self.0 as u64;
        let mut v = 0;
        while n.is_multiple_of(p) {
            n /= p;
            v += 1;
        }
        v
    }

    /// `ord_p(n!)` via Legendre's formula.
    pub fn ord_factorial(self, n: u64) -> u64 {
        let p = self.0 as u64;
        let mut total = 0;
        let mut q = n / p;
        while q > 0 {
            total += q;
            q /= p;
        }
        total
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(v: u64) -> Result<Self> {
        Prime::new(v)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}
