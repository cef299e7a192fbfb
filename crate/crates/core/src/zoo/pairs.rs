//! Digit-pair truncation and its rescaled copies.
//!
//! `f(x) = x` when no digit pair `(x_{2i}, x_{2i+1})` is `(0, 0)`; otherwise
//! `f(x) = sum_{j < 2i} x_j p^j` for the first zero pair `i` (so `f = 0` when
//! pair 0 is zero). `f` is continuous, differentiable with derivative 1 off
//! the set `E` of points without zero pairs, and not differentiable on `E`.
//! Since Haar-almost every point has infinitely many zero pairs, `E` is null.
//!
//! `g(x) = p^n f((x - p^n) / p^{n+1})` on `p^n + p^{n+1} Z_p` (`n >= 1`), 0
//! elsewhere, is not differentiable at 0; masking `g` by `n in N` gives a family.

use serde_json::json;

use super::balls::leading_one_balls;
use super::{random_integral, Claim, ClaimReport, Witness, ZooConfig, ZooEntry};
use crate::error::{Error, Result};
use crate::families::{Ground, IndexSet};
use crate::haar::{e_prefix_series, estimate_y0, sample_digits, with_rerun, SIGMAS};
use crate::padic::{Norm, PadicNumber, Prime};
use crate::quotient::{phi_r, probe_derivative, Domain, Func, SharedFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pair {
    Zero,
    Nonzero,
    Unknown,
}

fn pair_status(known: &[u32], i: usize) -> Pair {
    let a = known.get(2 * i).copied();
    let b = known.get(2 * i + 1).copied();
    match (a, b) {
        (Some(x), _) if x != 0 => Pair::Nonzero,
        (_, Some(y)) if y != 0 => Pair::Nonzero,
        (Some(0), Some(0)) => Pair::Zero,
        _ => Pair::Unknown,
    }
}

/// No zero pair among the first `k` digit pairs of `x` in `Z_p`.
pub fn e_prefix_member(x: &PadicNumber, k: u32) -> Result<bool> {
    if !x.is_integral() {
        return Err(Error::domain("E is a subset of Z_p"));
    }
    let digits = x.digits_below(2 * k as i64)?;
    Ok((0..k as usize).all(|i| pair_status(&digits, i) == Pair::Nonzero))
}

fn truncation_eval(precision: i64, x: &PadicNumber) -> Result<PadicNumber> {
    let prime = x.prime();
    if x.is_exact_zero() {
        return Ok(PadicNumber::zero(prime));
    }
    // Exact values are scanned to their expansion's end or to `precision`.
    let horizon = match x.finite_expansion() {
        Some((v, d)) => {
            let top = v + d.len() as i64;
            (top + top.rem_euclid(2) + 2).max(2)
        }
        None if x.is_exact() => precision,
        None => x.render_precision(),
    };
    let known = x.known_digits_below(horizon);
    let pairs = known.len().div_ceil(2) + 1;
    for i in 0..pairs {
        match pair_status(&known, i) {
            Pair::Nonzero => continue,
            Pair::Zero if i == 0 => return Ok(PadicNumber::zero(prime)),
            Pair::Zero => return PadicNumber::from_finite_digits(prime, 0, &known[..2 * i], 2 * i as i64),
            Pair::Unknown if i == 0 => {
                return Err(Error::precision_needed(2, "the first digit pair"));
            }
            // f agrees with x below 2i in every case
            Pair::Unknown => {
                let seen = x.at_precision(known.len() as i64).forget_exact();
                return Ok(seen.reduce_precision((2 * i) as i64));
            }
        }
    }
    unreachable!("the scan always ends on an unknown pair")
}

/// The truncation `f`; exact inputs without a terminating expansion are read to `precision` digits.
pub fn truncation_function(precision: i64) -> SharedFn {
    Func::new(Domain::Zp, move |x| truncation_eval(precision, x))
        .with_modulus(|m| m + 2)
        .shared()
}

fn scaled_eval(set: Option<IndexSet>, precision: i64, x: &PadicNumber) -> Result<PadicNumber> {
    let prime = x.prime();
    if x.is_exact_zero() {
        return Ok(PadicNumber::zero(prime));
    }
    let Some(n) = x.valuation() else {
        return Ok(PadicNumber::bounded_zero(prime, x.render_precision()));
    };
    if n < 1 || x.digit(n)? != 1 || set.is_some_and(|s| !s.contains(n as u64)) {
        return Ok(PadicNumber::zero(prime));
    }
    let inner = x.sub(&PadicNumber::p_power(prime, n, 1))?.shift(-(n + 1));
    let fx = truncation_eval(precision, &inner)?;
    Ok(fx.shift(n))
}

/// `g`, or its mask `g * sum_{n in N} 1_{B_n}` when `set` is given.
pub fn scaled_function(set: Option<IndexSet>, precision: i64) -> SharedFn {
    Func::new(Domain::Zp, move |x| scaled_eval(set, precision, x))
        .with_modulus(|m| m + 3)
        .shared()
}

/// `x_n = p^n / (1 - p)`: in `B_n` with `(x - p^n) / p^{n+1} = 1 / (1 - p)` in `E`.
pub fn e_ball_sequence(prime: Prime, precision: i64, set: Option<IndexSet>, steps: usize) -> Vec<(u64, PadicNumber)> {
    let q = PadicNumber::from_rational(1, 1 - prime.get() as i64, prime, precision).expect("p > 1");
    (1u64..)
        .filter(|&n| set.is_none_or(|s| s.contains(n)))
        .take(steps)
        .map(|n| (n, q.shift(n as i64)))
        .collect()
}

/// Checks `|f(x) - f(y)| < p^-(2m+1)` on random pairs agreeing below `2m + 2`.
pub fn continuity_violations(f: &SharedFn, prime: Prime, m: i64, samples: u64, seed: u64) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    let cut = 2 * m + 2;
    let bound = Norm::from_valuation(prime.get(), 2 * m + 1);
    for i in 0..samples {
        let len = (cut + 8) as usize;
        let x = random_integral(prime, seed, 2 * i, len);
        let tail = random_integral(prime, seed, 2 * i + 1, 8).shift(cut);
        let y = x.truncation_below(cut)?.add(&tail)?;
        let d = f.eval(&x)?.sub(&f.eval(&y)?)?;
        if d.norm_bound() >= bound {
            bad.push(format!("{x} vs {y}"));
        }
    }
    Ok(bad)
}

/// A random exact point whose first `k` digit pairs are all nonzero.
pub fn random_e_prefix_point(prime: Prime, seed: u64, index: u64, k: u32) -> PadicNumber {
    let mut digits = sample_digits(prime, seed, index, 2 * k as usize);
    for pair in digits.chunks_mut(2) {
        if pair == [0, 0] {
            pair[0] = 1;
        }
    }
    PadicNumber::from_finite_digits(prime, 0, &digits, 2 * k as i64).expect("digits below p")
}

/// `x_bar_n`: `x` through position `2n+1`, a zero pair, then `p^{2n+4}`.
pub fn e_deviation_point(x: &PadicNumber, n: i64) -> Result<PadicNumber> {
    let prime = x.prime();
    x.truncation_below(2 * n + 2)?.add(&PadicNumber::p_power(prime, 2 * n + 4, 1))
}

/// `min_n |Phi_1 f(x, x_bar_n) - 1|` over `n < k - 2`, for `x` with `k` nonzero leading pairs.
pub fn e_deviation(f: &SharedFn, x: &PadicNumber, k: u32) -> Result<Norm> {
    let prime = x.prime();
    let one = PadicNumber::one(prime, 1);
    let mut min: Option<Norm> = None;
    for n in 0..(k as i64 - 2) {
        let q = phi_r(&**f, &[x.clone(), e_deviation_point(x, n)?])?;
        let d = q.sub(&one)?.norm_bound();
        min = Some(match min {
            Some(m) if m <= d => m,
            _ => d,
        });
    }
    min.ok_or_else(|| Error::domain("need k >= 3 pairs"))
}

pub fn truncation_entry(cfg: &ZooConfig) -> Result<ZooEntry> {
    let prime = cfg.prime;
    let precision = cfg.precision;
    let function = truncation_function(precision);

    let f = function.clone();
    let continuity = Claim::new(
        "continuity-modulus",
        "|x - y| < p^-(2m+1) implies |f(x) - f(y)| < p^-(2m+1) for m = 1..=10",
        move |ctx| {
            let mut bad = Vec::new();
            for m in 1..=10 {
                for v in continuity_violations(&f, prime, m, ctx.samples, ctx.seed ^ m as u64)? {
                    bad.push(json!({"m": m, "pair": v}));
                }
            }
            Ok(ClaimReport::new(
                bad.is_empty(),
                format!("{} violations over {} pairs per m", bad.len(), ctx.samples),
                json!({"violations": bad}),
            ))
        },
    );
    let f = function.clone();
    let nondiff = Claim::new(
        "nondiff-at-E",
        "at points with k nonzero leading pairs, quotients towards x_bar_n stay p^-2 away from 1",
        move |ctx| {
            let k = ctx.k.max(3);
            let bound = Norm::from_valuation(prime.get(), 2);
            let mut bad = Vec::new();
            let count = ctx.samples.min(1000);
            for i in 0..count {
                let x = random_e_prefix_point(prime, ctx.seed, i, k);
                let d = e_deviation(&f, &x, k)?;
                if d < bound {
                    bad.push(json!({"x": x.to_string(), "deviation": d}));
                }
            }
            Ok(ClaimReport::new(
                bad.is_empty(),
                format!("{} of {count} points below p^-2", bad.len()),
                json!({"k": k, "failures": bad}),
            ))
        },
    );
    let f = function.clone();
    let cases = Claim::new("cases", "the three defining cases on fixed inputs", move |_| {
        let all_ones = PadicNumber::from_rational(1, 1 - prime.get() as i64, prime, precision)?;
        let lead_zero = PadicNumber::from_finite_digits(prime, 2, &[1, 1, 1], 8)?;
        let trunc_in = PadicNumber::from_finite_digits(prime, 0, &[1, 1, 0, 0, 1], 8)?;
        let trunc_out = PadicNumber::from_finite_digits(prime, 0, &[1, 1], 8)?;
        let r1 = f.eval(&all_ones)?;
        let r2 = f.eval(&lead_zero)?;
        let r3 = f.eval(&trunc_in)?;
        let ok1 = r1.agrees_with(&all_ones) && r1.render_precision() >= precision - 1;
        let ok2 = r2.is_exact_zero();
        let ok3 = r3.exact_eq(&trunc_out) == Some(true);
        Ok(ClaimReport::new(
            ok1 && ok2 && ok3,
            format!("identity {ok1}, zero {ok2}, truncation {ok3}"),
            json!({"identity": r1.to_string(), "zero": r2.to_string(), "truncation": r3.to_string()}),
        ))
    });

    let witness = Witness::new(
        "E-deviation",
        "(x, x_bar_n) for a random point with nonzero leading pairs",
        2,
        move |steps| {
            let x = random_e_prefix_point(prime, 0, 0, steps as u32 + 2);
            (0..steps as i64)
                .map(|n| Ok((n as u64, vec![x.clone(), e_deviation_point(&x, n)?])))
                .collect()
        },
    );

    Ok(ZooEntry {
        name: "pair-truncation",
        description: "x truncated before its first zero digit pair",
        function,
        derivative: None,
        witnesses: vec![witness],
        claims: vec![continuity, nondiff, cases],
    })
}

fn not_diff_claim(g: SharedFn, prime: Prime, precision: i64, set: Option<IndexSet>) -> Claim {
    Claim::new(
        "not-diff-at-0",
        "quotients at 0 have norm 1 along p^n / (1 - p) but vanish along p^n",
        move |ctx| {
            let zero = PadicNumber::zero(prime);
            let inside = probe_derivative(&*g, &zero, e_ball_sequence(prime, precision, set, ctx.steps), ctx.steps)?;
            let unit = Norm::power(prime.get(), 0);
            let ones = inside.rows.iter().all(|r| r.norm == unit);
            let outside_seq = (1u64..).map(|n| (n, PadicNumber::p_power(prime, n as i64, 1)));
            let outside = probe_derivative(&*g, &zero, outside_seq, ctx.steps)?;
            let zeros = outside.rows.iter().all(|r| r.quotient.is_exact_zero());
            Ok(ClaimReport::new(
                ones && zeros && !inside.rows.is_empty(),
                format!("norm 1 along the E-sequence: {ones}; zero along p^n: {zeros}"),
                json!({"e_sequence": inside.to_json(), "powers": outside.to_json()}),
            ))
        },
    )
}

fn disjoint_claim(prime: Prime) -> Claim {
    Claim::new("disjoint-balls", "the balls p^n + p^(n+1) Z_p are pairwise disjoint", move |ctx| {
        let count = ctx.steps.max(50) as u64;
        let ok = leading_one_balls(prime, count).pairwise_disjoint()?;
        Ok(ClaimReport::new(ok, format!("checked {count} balls"), json!({"count": count})))
    })
}

fn e_sequence_witness(prime: Prime, precision: i64, set: Option<IndexSet>) -> Witness {
    Witness::new("E-sequence", "x_n = p^n / (1 - p)", 1, move |steps| {
        Ok(e_ball_sequence(prime, precision, set, steps)
            .into_iter()
            .map(|(n, x)| (n, vec![x]))
            .collect())
    })
}

pub fn scaled_entry(cfg: &ZooConfig) -> Result<ZooEntry> {
    let (prime, precision) = (cfg.prime, cfg.precision);
    let function = scaled_function(None, precision);
    Ok(ZooEntry {
        name: "pair-truncation-scaled",
        description: "p^n f((x - p^n) / p^(n+1)) on p^n + p^(n+1) Z_p, else 0",
        function: function.clone(),
        derivative: None,
        witnesses: vec![e_sequence_witness(prime, precision, None)],
        claims: vec![not_diff_claim(function, prime, precision, None), disjoint_claim(prime)],
    })
}

pub fn masked_entry(cfg: &ZooConfig) -> Result<ZooEntry> {
    let (prime, precision) = (cfg.prime, cfg.precision);
    let set = cfg.index_set(Ground::Naturals)?;
    let function = scaled_function(Some(set), precision);
    Ok(ZooEntry {
        name: "pair-truncation-masked",
        description: "the scaled truncation restricted to the balls p^n + p^(n+1) Z_p with n in N",
        function: function.clone(),
        derivative: None,
        witnesses: vec![e_sequence_witness(prime, precision, Some(set))],
        claims: vec![not_diff_claim(function, prime, precision, Some(set)), disjoint_claim(prime)],
    })
}

/// The Haar entry: the indicator of `Y_0 = 1` with the Monte Carlo claims.
pub fn haar_entry(cfg: &ZooConfig) -> Result<ZooEntry> {
    let prime = cfg.prime;
    let function = Func::new(Domain::Zp, move |x| {
        let hit = crate::haar::y_i(x, 0)?;
        Ok(if hit { PadicNumber::one(prime, 1) } else { PadicNumber::zero(prime) })
    })
    .with_modulus(|_| 2)
    .shared();

    let e_prefix = Claim::new(
        "E-prefix",
        "the measure of {no zero pair among the first k pairs} matches (1 - 1/p^2)^k within 3 sigma",
        move |ctx| {
            let k = ctx.k.max(1);
            let (series, rerun) = {
                let first = e_prefix_series(prime, k, ctx.samples.max(1), ctx.seed)?;
                if first.iter().all(|r| r.within(SIGMAS)) {
                    (first, false)
                } else {
                    (e_prefix_series(prime, k, ctx.samples.max(1), crate::haar::rerun_seed(ctx.seed))?, true)
                }
            };
            let passed = series.iter().all(|r| r.within(SIGMAS));
            let last = series.last().expect("k >= 1");
            Ok(ClaimReport::new(
                passed,
                format!(
                    "k = {k}: estimate {:.5} vs target {:.5} (z = {:.2}){}",
                    last.estimate,
                    last.target,
                    last.z_score,
                    if rerun { ", after rerun" } else { "" }
                ),
                json!({"reports": series, "rerun": rerun}),
            ))
        },
    );
    let y0 = Claim::new("Y0-mean", "the mean of Y_0 matches 1/p^2 within 3 sigma", move |ctx| {
        let samples = ctx.samples.max(1);
        let (report, rerun) = with_rerun(ctx.seed, |s| estimate_y0(prime, samples, s).expect("samples >= 1"));
        Ok(ClaimReport::new(
            report.within(SIGMAS),
            format!("estimate {:.5} vs target {:.5} (z = {:.2})", report.estimate, report.target, report.z_score),
            json!({"report": report, "rerun": rerun}),
        ))
    });

    Ok(ZooEntry {
        name: "haar",
        description: "indicator of a zero first digit pair, with Haar Monte Carlo checks",
        function,
        derivative: None,
        witnesses: Vec::new(),
        claims: vec![e_prefix, y0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn defining_cases() {
        let prime = p(3);
        let f = truncation_function(40);
        let ones = PadicNumber::from_rational(1, -2, prime, 40).unwrap();
        let r = f.eval(&ones).unwrap();
        assert!(r.agrees_with(&ones));
        assert_eq!(r.abs_precision(), Some(40));
        assert!(f.eval(&PadicNumber::from_integer(9, prime, 8)).unwrap().is_exact_zero());
        let x = PadicNumber::from_finite_digits(prime, 0, &[1, 1, 0, 0, 1], 8).unwrap();
        assert!(f.eval(&x).unwrap().exact_eq(&PadicNumber::from_integer(4, prime, 8)).unwrap());
        // a terminating expansion ends in zero pairs
        let t = PadicNumber::from_integer(1 + 3 + 9 * 2, prime, 8);
        assert!(f.eval(&t).unwrap().exact_eq(&t).unwrap());
    }

    #[test]
    fn precision_boundaries() {
        let prime = p(2);
        let f = truncation_function(40);
        let x = PadicNumber::from_digits(prime, 0, &[0], 1).unwrap();
        assert!(f.eval(&x).unwrap_err().is_insufficient_precision());
        let x = PadicNumber::from_digits(prime, 0, &[1, 0, 1, 1, 0], 5).unwrap();
        let r = f.eval(&x).unwrap();
        assert_eq!(r.abs_precision(), Some(4));
        assert!(r.agrees_with(&x));
        let x = PadicNumber::from_digits(prime, 0, &[1, 0, 1, 1, 1], 5).unwrap();
        assert_eq!(f.eval(&x).unwrap().abs_precision(), Some(5));
    }

    #[test]
    fn e_prefix_membership() {
        let prime = p(2);
        let x = PadicNumber::from_digits(prime, 0, &[1, 0, 0, 1, 0, 0], 6).unwrap();
        assert!(e_prefix_member(&x, 2).unwrap());
        assert!(!e_prefix_member(&x, 3).unwrap());
        assert!(e_prefix_member(&x, 4).unwrap_err().is_insufficient_precision());
    }

    #[test]
    fn scaled_on_e_sequence_is_the_identity() {
        let prime = p(5);
        let g = scaled_function(None, 40);
        for (_, x) in e_ball_sequence(prime, 40, None, 5) {
            assert!(g.eval(&x).unwrap().agrees_with(&x));
        }
        assert!(g.eval(&PadicNumber::p_power(prime, 3, 1)).unwrap().is_exact_zero());
        let masked = scaled_function(Some(IndexSet::new(1, 0, Ground::Naturals).unwrap()), 40);
        assert!(masked.eval(&PadicNumber::from_rational(25, -4, prime, 40).unwrap()).unwrap().is_exact_zero());
    }

    #[test]
    fn entry_claims_pass() {
        let cfg = ZooConfig::new(p(2));
        let ctx = super::super::ClaimContext {
            steps: 10,
            samples: 300,
            k: 6,
            ..Default::default()
        };
        for name in ["pair-truncation", "pair-truncation-scaled", "pair-truncation-masked", "haar"] {
            let e = super::super::entry(name, &cfg).unwrap();
            for c in &e.claims {
                let r = c.run(&ctx).unwrap();
                assert!(r.passed, "{name} {}: {}", c.name, r.summary);
            }
        }
    }
}
