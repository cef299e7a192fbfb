//! `f_N = sum_{n in N} p^{m_{sigma(n)}} e_{sigma(n)}`: a van der Put series on
//! the disjoint balls around `M = {d p^j}` whose coefficients decay just fast
//! enough for `|a_k| k -> 0` (so `f_N` has zero derivative) while
//! `|a_k| k^alpha` is unbounded for every `alpha > 1` (so `f_N` is not `Lip_alpha`).

use num_bigint::BigUint;
use num_traits::Zero;
use serde_json::json;

use super::balls::{m_at_sigma, m_schedule, sigma, sigma_index};
use super::{derivative_claim, random_integral, Claim, ClaimReport, ZooConfig, ZooEntry};
use crate::error::Result;
use crate::families::{Ground, IndexSet};
use crate::padic::{PadicNumber, Prime};
use crate::quotient::{constant, Domain, Func, SharedFn};
use crate::vanderput::{drop_leading_digit, n1_criterion, weighted_rows, CriterionRow, VdPSeries};

fn ladder_eval(set: IndexSet, x: &PadicNumber) -> Result<PadicNumber> {
    let prime = x.prime();
    if x.is_exact_zero() {
        return Ok(PadicNumber::zero(prime));
    }
    let Some(j) = x.valuation() else {
        // x lies in some ball with j >= K, where the coefficients are at most p^-m_{p^K}.
        let k = x.render_precision().max(0) as u64;
        return Ok(PadicNumber::bounded_zero(prime, m_schedule(prime, &prime.pow(k)) as i64));
    };
    let d = x.digit(j)?;
    let n = sigma_index(prime, j as u64, d);
    if set.contains(n) {
        Ok(PadicNumber::p_power(prime, m_at_sigma(prime, n) as i64, 1))
    } else {
        Ok(PadicNumber::zero(prime))
    }
}

/// The function `f_N` on `Z_p`.
pub fn ladder_function(set: IndexSet) -> SharedFn {
    Func::new(Domain::Zp, move |x| ladder_eval(set, x))
        .with_modulus(|m| m.max(1))
        .shared()
}

/// Rows for the indices `sigma(n)`, `n = 0..=n_max`, with weight `alpha`.
pub fn sigma_rows(series: &VdPSeries, n_max: u64, alpha: f64) -> Result<Vec<CriterionRow>> {
    let prime = series.prime();
    weighted_rows(series, (0..=n_max).map(|n| sigma(prime, n)), alpha)
}

/// Indices `2 <= n <= n_max` where `|a_{sigma(n)}| sigma(n) > p / ln n` (with a
/// relative float slack of `1e-12` on the log scale).
pub fn decay_bound_violations(rows: &[CriterionRow], prime: Prime) -> Vec<u64> {
    rows.iter()
        .enumerate()
        .skip(2)
        .filter(|(n, r)| {
            let bound = prime.ln() - (*n as f64).ln().ln();
            r.ln_times_n.is_some_and(|v| v > bound + 1e-12 * bound.abs().max(1.0))
        })
        .map(|(n, _)| n as u64)
        .collect()
}

pub fn entry(cfg: &ZooConfig) -> Result<ZooEntry> {
    let prime = cfg.prime;
    let precision = cfg.precision;
    let set = cfg.index_set(Ground::NaturalsWithZero)?;
    let function = ladder_function(set);

    let f = function.clone();
    let n1 = Claim::new(
        "n1-trend",
        "|a_sigma(n)| sigma(n) <= p / ln n and |a_k| k decays over dyadic windows",
        move |ctx| {
            let series = VdPSeries::new(f.clone(), prime, precision);
            let rows = sigma_rows(&series, ctx.n_max, 1.0)?;
            let bad = decay_bound_violations(&rows, prime);
            let window = n1_criterion(&series, ctx.n_max.clamp(2, 1 << 14))?;
            Ok(ClaimReport::new(
                bad.is_empty() && window.decaying,
                format!("{} bound violations, dyadic trend decaying = {}", bad.len(), window.decaying),
                json!({"violations": bad, "windows": window.windows}),
            ))
        },
    );
    let f = function.clone();
    let lip = Claim::new(
        "lip-fails",
        "sup |a_sigma(n)| sigma(n)^alpha over the prefix exceeds 100",
        move |ctx| {
            let series = VdPSeries::new(f.clone(), prime, precision);
            let rows = sigma_rows(&series, ctx.n_max, ctx.alpha)?;
            let ln_sup = rows.last().and_then(|r| r.ln_running_sup);
            let passed = ln_sup.is_some_and(|s| s > 100f64.ln());
            Ok(ClaimReport::new(
                passed,
                format!(
                    "alpha = {}, ln sup = {}",
                    ctx.alpha,
                    ln_sup.map_or("-inf".into(), |s| format!("{s:.3}"))
                ),
                json!({"alpha": ctx.alpha, "n_max": ctx.n_max, "ln_sup": ln_sup}),
            ))
        },
    );
    let f = function.clone();
    let readback = Claim::new(
        "coefficient-readback",
        "a_sigma(n) = p^m_sigma(n) for n in N, 0 otherwise, and a_k = 0 off M",
        move |ctx| {
            let series = VdPSeries::new(f.clone(), prime, precision);
            let mut bad = Vec::new();
            for n in 0..ctx.steps as u64 {
                let want = if set.contains(n) {
                    PadicNumber::p_power(prime, m_at_sigma(prime, n) as i64, 1)
                } else {
                    PadicNumber::zero(prime)
                };
                if series.coefficient(&sigma(prime, n))?.exact_eq(&want) != Some(true) {
                    bad.push(json!({"n": n}));
                }
            }
            // k = d p^j exactly when every digit below the leading one is 0
            let in_m = |k: u64| {
                let k = BigUint::from(k);
                drop_leading_digit(prime, &k).is_zero()
            };
            for k in 1..=ctx.n_max.min(4096) {
                if !in_m(k) && !series.coeff(k)?.is_exact_zero() {
                    bad.push(json!({"k": k}));
                }
            }
            Ok(ClaimReport::new(
                bad.is_empty(),
                format!("{} mismatches", bad.len()),
                json!({"mismatches": bad}),
            ))
        },
    );
    let zero = constant(PadicNumber::zero(prime));
    let consistency = derivative_claim(function.clone(), zero.clone(), move |seed, i| {
        random_integral(prime, seed, i, 6)
    });

    Ok(ZooEntry {
        name: "log-ladder",
        description: "van der Put series with coefficients p^m_sigma(n) on the disjoint balls of M",
        function,
        derivative: Some(zero),
        witnesses: Vec::new(),
        claims: vec![n1, lip, readback, consistency],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vanderput::decompose;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn coefficients_read_back() {
        let prime = p(3);
        let set = IndexSet::all(Ground::NaturalsWithZero);
        let s = decompose(ladder_function(set), prime, 32, 200).unwrap();
        for n in 0..8 {
            let a = s.coefficient(&sigma(prime, n)).unwrap();
            let m = m_schedule(prime, &sigma(prime, n)) as i64;
            assert!(a.exact_eq(&PadicNumber::p_power(prime, m, 1)).unwrap());
        }
        assert!(s.coeff(4).unwrap().is_exact_zero()); // 4 = 11_3 is not in M
    }

    #[test]
    fn value_outside_the_balls() {
        let prime = p(2);
        let odd = IndexSet::new(1, 0, Ground::NaturalsWithZero).unwrap();
        let f = ladder_function(odd);
        // sigma(0) = 1 is not selected
        assert!(f.eval(&PadicNumber::from_integer(5, prime, 8)).unwrap().is_exact_zero());
        assert!(f.eval(&PadicNumber::from_integer(2, prime, 8)).unwrap().exact_eq(&PadicNumber::p_power(prime, 1, 1)).unwrap());
        let z = f.eval(&PadicNumber::bounded_zero(prime, 3)).unwrap();
        assert_eq!(z.render_precision(), 4); // m_8 = 4
        assert!(f.eval(&PadicNumber::from_rational(1, 2, prime, 8).unwrap()).is_err());
    }

    #[test]
    fn entry_claims_pass() {
        let e = entry(&ZooConfig::new(p(2))).unwrap();
        let ctx = super::super::ClaimContext {
            steps: 20,
            samples: 20,
            n_max: 600,
            ..Default::default()
        };
        for c in &e.claims {
            let r = c.run(&ctx).unwrap();
            assert!(r.passed, "{}: {}", c.name, r.summary);
        }
    }
}
