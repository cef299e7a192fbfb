//! Ball systems, the disjoint van der Put balls `M`, and the `m_n` schedule.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::padic::{PadicNumber, Prime};
use crate::vanderput::{digit_length, ln_big};

/// A region cut out by a valuation condition around an exact center.
#[derive(Clone, Debug)]
pub enum Region {
    /// `{x : v(x - center) >= min_valuation}`
    Ball { center: PadicNumber, min_valuation: i64 },
    /// `{x : v(x - center) = valuation}`
    Sphere { center: PadicNumber, valuation: i64 },
}

impl Region {
    /// Closed ball `|x - c| <= p^-k`.
    pub fn closed_ball(center: PadicNumber, k: i64) -> Self {
        Region::Ball {
            center,
            min_valuation: k,
        }
    }

    /// Open ball `|x - c| < p^-k`.
    pub fn open_ball(center: PadicNumber, k: i64) -> Self {
        Region::Ball {
            center,
            min_valuation: k + 1,
        }
    }

    pub fn sphere(center: PadicNumber, k: i64) -> Self {
        Region::Sphere {
            center,
            valuation: k,
        }
    }

    pub fn center(&self) -> &PadicNumber {
        match self {
            Region::Ball { center, .. } | Region::Sphere { center, .. } => center,
        }
    }

    /// Membership; needs the digits of `x - center` up to the defining valuation.
    pub fn contains(&self, x: &PadicNumber) -> Result<bool> {
        let d = x.sub(self.center())?;
        let (need, test): (i64, Box<dyn Fn(i64) -> bool>) = match self {
            Region::Ball { min_valuation, .. } => (*min_valuation, Box::new(move |v| v >= *min_valuation)),
            Region::Sphere { valuation, .. } => (valuation + 1, Box::new(move |v| v == *valuation)),
        };
        if d.is_exact_zero() {
            return Ok(matches!(self, Region::Ball { .. }));
        }
        match d.valuation() {
            Some(v) => Ok(test(v)),
            None if d.render_precision() >= need => Ok(matches!(self, Region::Ball { .. })),
            None => Err(Error::precision_needed(need, "region membership")),
        }
    }

    /// Whether two regions are disjoint. Spheres are only compared with
    /// spheres sharing their center.
    pub fn disjoint_from(&self, other: &Region) -> Result<bool> {
        let gap = other.center().sub(self.center())?;
        let gap_val = if gap.is_exact_zero() {
            None
        } else {
            Some(gap.valuation().ok_or_else(|| Error::domain("region centers must be exact"))?)
        };
        match (self, other) {
            (Region::Ball { min_valuation: a, .. }, Region::Ball { min_valuation: b, .. }) => {
                Ok(gap_val.is_some_and(|g| g < (*a).min(*b)))
            }
            (Region::Sphere { valuation: a, .. }, Region::Sphere { valuation: b, .. })
                if gap_val.is_none() =>
            {
                Ok(a != b)
            }
            _ => Err(Error::domain("unsupported region comparison")),
        }
    }
}

/// The pairwise disjoint regions used by one construction.
#[derive(Clone, Debug)]
pub struct BallSystem {
    pub regions: Vec<Region>,
}

impl BallSystem {
    /// Checks every pair.
    pub fn pairwise_disjoint(&self) -> Result<bool> {
        for (i, a) in self.regions.iter().enumerate() {
            for b in &self.regions[i + 1..] {
                if !a.disjoint_from(b)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Index of the region containing `x`, if any.
    pub fn locate(&self, x: &PadicNumber) -> Result<Option<usize>> {
        for (i, r) in self.regions.iter().enumerate() {
            if r.contains(x)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

fn exact(prime: Prime, n: impl Into<BigInt>) -> PadicNumber {
    PadicNumber::from_integer(n, prime, 1)
}

/// `B_{p^-2n}(p^n)` for `1 <= n <= count`.
pub fn sphere_point_balls(prime: Prime, count: u64) -> BallSystem {
    BallSystem {
        regions: (1..=count as i64)
            .map(|n| Region::open_ball(PadicNumber::p_power(prime, n, 1), 2 * n))
            .collect(),
    }
}

/// `p^n + p^{n+1} Z_p` for `1 <= n <= count`.
pub fn leading_one_balls(prime: Prime, count: u64) -> BallSystem {
    BallSystem {
        regions: (1..=count as i64)
            .map(|n| Region::closed_ball(PadicNumber::p_power(prime, n, 1), n + 1))
            .collect(),
    }
}

/// `a + p^{n^2} + p^{n^2+1} Z_p` for `1 <= n <= count`.
pub fn square_balls(a: &PadicNumber, count: u64) -> Result<BallSystem> {
    let prime = a.prime();
    let regions = (1..=count as i64)
        .map(|n| {
            let c = a.add(&PadicNumber::p_power(prime, n * n, 1))?;
            Ok(Region::closed_ball(c, n * n + 1))
        })
        .collect::<Result<_>>()?;
    Ok(BallSystem { regions })
}

/// Spheres `|x| = p^{-n^2}` for `1 <= n <= count`.
pub fn square_spheres(prime: Prime, count: u64) -> BallSystem {
    BallSystem {
        regions: (1..=count as i64)
            .map(|n| Region::sphere(PadicNumber::zero(prime), n * n))
            .collect(),
    }
}

/// The van der Put ball of `n >= 1`: points agreeing with all digits of `n`.
pub fn vdp_ball(prime: Prime, n: &BigUint) -> Region {
    Region::closed_ball(exact(prime, BigInt::from(n.clone())), digit_length(prime, n) as i64)
}

/// The `n`-th element (from 0) of `M = {d p^j : 1 <= d < p, j >= 0}` in increasing order.
pub fn sigma(prime: Prime, n: u64) -> BigUint {
    let q = prime.get() as u64 - 1;
    BigUint::from(n % q + 1) * prime.pow(n / q)
}

/// `(j, d)` with `sigma(n) = d p^j`.
pub fn sigma_parts(prime: Prime, n: u64) -> (u64, u32) {
    let q = prime.get() as u64 - 1;
    (n / q, (n % q + 1) as u32)
}

/// Inverse of [`sigma_parts`].
pub fn sigma_index(prime: Prime, j: u64, d: u32) -> u64 {
    j * (prime.get() as u64 - 1) + d as u64 - 1
}

/// Greedy construction: walk `1, 2, 3, ...` and keep every `n` whose van der
/// Put ball misses all balls kept so far. Returns the kept integers `<= limit`.
pub fn greedy_disjoint_indices(prime: Prime, limit: u64) -> Vec<u64> {
    let mut kept: Vec<(u64, u64)> = Vec::new(); // (n, p^len(n))
    for n in 1..=limit {
        let len = digit_length(prime, &BigUint::from(n));
        let modulus = prime.pow(len as u64).to_u64().expect("small modulus");
        // Ultrametric balls are nested or disjoint: they meet iff the centers
        // agree modulo the coarser modulus.
        let meets = kept.iter().any(|&(m, mm)| n % mm.min(modulus) == m % mm.min(modulus));
        if !meets {
            kept.push((n, modulus));
        }
    }
    kept.into_iter().map(|(n, _)| n).collect()
}

/// The disjoint balls around the first `count` elements of `M`, and those elements.
pub fn build_disjoint_balls(prime: Prime, count: u64) -> (BallSystem, Vec<BigUint>) {
    let centers: Vec<BigUint> = (0..count).map(|n| sigma(prime, n)).collect();
    let regions = centers.iter().map(|c| vdp_ball(prime, c)).collect();
    (BallSystem { regions }, centers)
}

/// How close `floor` arguments may come to an integer before the float
/// evaluation of the schedule is considered unreliable.
pub const SCHEDULE_GUARD: f64 = 1e-9;

/// `m_k = max(1, floor(ln(k ln k) / ln p))`, with `m_1 = 1`.
///
/// The argument is split as `s + (ln(k / p^s) + ln ln k) / ln p` with
/// `s = floor(log_p k)` so the fractional part keeps full float precision for
/// huge `k`. Panics if the argument lies within [`SCHEDULE_GUARD`] of an
/// integer, where the floor would be decided by rounding error.
pub fn m_schedule(prime: Prime, k: &BigUint) -> u64 {
    if *k <= BigUint::one() {
        return 1;
    }
    let s = digit_length(prime, k) as u64 - 1;
    let ln_p = prime.ln();
    let ln_k = ln_big(k);
    let ln_lead = ln_k - s as f64 * ln_p;
    let frac = (ln_lead + ln_k.ln()) / ln_p;
    assert!(
        (frac - frac.round()).abs() > SCHEDULE_GUARD,
        "m schedule undecidable in floating point at k = {k}"
    );
    let m = s as i64 + frac.floor() as i64;
    m.max(1) as u64
}

/// `m_{sigma(n)}` computed from the `(j, d)` form of `sigma(n)` without building it.
pub fn m_at_sigma(prime: Prime, n: u64) -> u64 {
    let (j, d) = sigma_parts(prime, n);
    if j == 0 && d == 1 {
        return 1;
    }
    let ln_p = prime.ln();
    let ln_d = (d as f64).ln();
    let ln_k = ln_d + j as f64 * ln_p;
    let frac = (ln_d + ln_k.ln()) / ln_p;
    assert!(
        (frac - frac.round()).abs() > SCHEDULE_GUARD,
        "m schedule undecidable in floating point at sigma({n})"
    );
    (j as i64 + frac.floor() as i64).max(1) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn greedy_matches_closed_form() {
        for prime in [2, 3, 5, 7] {
            let prime = p(prime);
            let greedy = greedy_disjoint_indices(prime, 3000);
            let closed: Vec<u64> = (0..greedy.len() as u64)
                .map(|n| sigma(prime, n).to_u64().unwrap())
                .collect();
            assert_eq!(greedy, closed);
        }
    }

    #[test]
    fn first_two_balls_for_p2() {
        let (balls, centers) = build_disjoint_balls(p(2), 2);
        assert_eq!(centers, vec![BigUint::from(1u8), BigUint::from(2u8)]);
        let one_mod_two = PadicNumber::from_integer(5, p(2), 8);
        assert!(balls.regions[0].contains(&one_mod_two).unwrap());
        assert!(!balls.regions[1].contains(&one_mod_two).unwrap());
        assert!(balls.pairwise_disjoint().unwrap());
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(m_schedule(p(2), &BigUint::from(8u8)), 4);
        assert_eq!(m_schedule(p(2), &BigUint::from(1u8)), 1);
        assert_eq!(m_schedule(p(2), &BigUint::from(2u8)), 1);
        for prime in [2, 3, 5] {
            let prime = p(prime);
            for n in 0..200 {
                assert_eq!(m_at_sigma(prime, n), m_schedule(prime, &sigma(prime, n)), "n = {n}");
            }
        }
    }

    #[test]
    fn schedule_is_nondecreasing() {
        let prime = p(3);
        let ms: Vec<u64> = (1..5000u64).map(|k| m_schedule(prime, &BigUint::from(k))).collect();
        assert!(ms.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn region_systems_are_disjoint() {
        let prime = p(3);
        assert!(sphere_point_balls(prime, 30).pairwise_disjoint().unwrap());
        assert!(leading_one_balls(prime, 30).pairwise_disjoint().unwrap());
        assert!(square_spheres(prime, 30).pairwise_disjoint().unwrap());
        let a = PadicNumber::from_rational(2, 7, prime, 8).unwrap();
        assert!(square_balls(&a, 10).unwrap().pairwise_disjoint().unwrap());
    }

    #[test]
    fn membership_needs_digits() {
        let prime = p(5);
        let ball = Region::open_ball(PadicNumber::p_power(prime, 2, 1), 4);
        let x = PadicNumber::from_digits(prime, 0, &[0, 0, 1, 0], 4).unwrap();
        assert!(ball.contains(&x).unwrap_err().is_insufficient_precision());
        let y = PadicNumber::from_digits(prime, 0, &[0, 0, 1, 0, 3], 5).unwrap();
        assert!(!ball.contains(&y).unwrap());
    }
}
