use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

/// A value of the p-adic absolute value: either `0` or an exact power `p^e`.
///
/// The prime is carried along so that norms of different primes never
/// compare as equal or ordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Norm {
    Zero,
    Power { prime: u32, exponent: i64 },
}

impl Norm {
    pub fn power(prime: u32, exponent: i64) -> Self {
        Norm::Power { prime, exponent }
    }

    /// `|x|_p` for `x` of the given valuation.
    pub fn from_valuation(prime: u32, valuation: i64) -> Self {
        Norm::Power {
            prime,
            exponent: -valuation,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Norm::Zero)
    }

    /// The exponent `e` in `p^e`, `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        match self {
            Norm::Zero => None,
            Norm::Power { exponent, .. } => Some(*exponent),
        }
    }

    pub fn ln(&self) -> f64 {
        match self {
            Norm::Zero => f64::NEG_INFINITY,
            Norm::Power { prime, exponent } => *exponent as f64 * (*prime as f64).ln(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Norm::Zero => 0.0,
            Norm::Power { prime, exponent } => (*prime as f64).powf(*exponent as f64),
        }
    }

    pub fn powi(self, k: i64) -> Norm {
        match self {
            Norm::Zero if k > 0 => Norm::Zero,
            Norm::Zero => panic!("nonpositive power of the zero norm"),
            Norm::Power { prime, exponent } => Norm::Power {
                prime,
                exponent: exponent * k,
            },
        }
    }

    pub fn max(self, other: Norm) -> Norm {
        if self.partial_cmp(&other) == Some(Ordering::Less) {
            other
        } else {
            self
        }
    }
}

impl std::ops::Mul for Norm {
    type Output = Norm;

    fn mul(self, other: Norm) -> Norm {
        match (self, other) {
            (Norm::Power { prime, exponent: a }, Norm::Power { prime: q, exponent: b }) => {
                assert_eq!(prime, q, "norms of different primes");
                Norm::Power {
                    prime,
                    exponent: a + b,
                }
            }
            _ => Norm::Zero,
        }
    }
}

/// `self / other`; `other` must be nonzero.
impl std::ops::Div for Norm {
    type Output = Norm;

    fn div(self, other: Norm) -> Norm {
        match other {
            Norm::Zero => panic!("division by the zero norm"),
            Norm::Power { prime, exponent } => {
                self * Norm::Power {
                    prime,
                    exponent: -exponent,
                }
            }
        }
    }
}

impl PartialOrd for Norm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Norm::Zero, Norm::Zero) => Some(Ordering::Equal),
            (Norm::Zero, _) => Some(Ordering::Less),
            (_, Norm::Zero) => Some(Ordering::Greater),
            (Norm::Power { prime: p, exponent: a }, Norm::Power { prime: q, exponent: b }) => {
                if p == q {
                    Some(a.cmp(b))
                } else {
                    None
                }
            }
        }
    }
}

/// Renders as `0` or `p^e`.
impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Zero => write!(f, "0"),
            Norm::Power { exponent, .. } => write!(f, "p^{exponent}"),
        }
    }
}

impl Serialize for Norm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_arithmetic() {
        let a = Norm::power(5, -2);
        let b = Norm::power(5, 1);
        assert!(a < b);
        assert!(Norm::Zero < a);
        assert_eq!(a * b, Norm::power(5, -1));
        assert_eq!(b / a, Norm::power(5, 3));
        assert_eq!(a.powi(3), Norm::power(5, -6));
        assert_eq!(Norm::power(2, 0).partial_cmp(&Norm::power(3, 0)), None);
        assert_eq!(a.to_string(), "p^-2");
        assert!((Norm::power(2, -3).to_f64() - 0.125).abs() < 1e-15);
    }
}
