//! Digit spreading: `g_N(x) = sum_{n in N, n >= 0} x_n p^{2n}`.
//!
//! `|g_N(x) - g_N(y)| <= |x - y|^2`, so `g_N` is strictly differentiable with
//! derivative 0, yet combinations over an independent family are not strictly
//! differentiable of order 2: along `(p^n, 0, p^n + p^{n+})` the second
//! divided difference has norm `|beta_1|`.

use rand::Rng;
use serde_json::json;

use super::{
    derivative_claim, norm_mismatches, random_coefficients, random_integral, Claim, ClaimReport,
    Witness, ZooConfig, ZooEntry,
};
use crate::error::{Error, Result};
use crate::families::{isolating_cell, Cell, Ground, IndexSet};
use crate::haar::digit_rng;
use crate::padic::{Norm, PadicNumber, Prime};
use crate::quotient::{constant, linear_combination, probe_strict_order2, Domain, Func, SharedFn, WitnessTrace};

/// `sum_{n < len, n in N} d_n p^{2n}` as digits from position 0.
fn spread_digits(set: IndexSet, digits: &[u32]) -> Vec<u32> {
    let mut out = vec![0; 2 * digits.len()];
    for (n, &d) in digits.iter().enumerate() {
        if set.contains(n as u64) {
            out[2 * n] = d;
        }
    }
    out
}

fn spread_eval(set: IndexSet, precision: i64, x: &PadicNumber) -> Result<PadicNumber> {
    let prime = x.prime();
    if x.is_exact_zero() {
        return Ok(PadicNumber::zero(prime));
    }
    if let Some((v, digits)) = x.finite_expansion() {
        // Terminating expansion: the image is a finite sum, kept exact.
        let skip = (-v).max(0) as usize;
        let start = v.max(0) as usize;
        let mut nonneg = vec![0; start];
        nonneg.extend(digits.iter().skip(skip));
        return PadicNumber::from_finite_digits(prime, 0, &spread_digits(set, &nonneg), 1);
    }
    // Known digits end at `known`; unseen positions n >= known add p^{2n}.
    let known = if x.is_exact() { precision } else { x.render_precision() };
    let known = known.max(0);
    let digits = x.at_precision(known).known_digits_below(known);
    let out_precision = 2 * known;
    if out_precision == 0 {
        return Ok(PadicNumber::bounded_zero(prime, 0));
    }
    let mut spread = spread_digits(set, &digits);
    spread.truncate(out_precision as usize);
    PadicNumber::from_digits(prime, 0, &spread, out_precision)
}

/// The function `g_N`; exact non-terminating inputs are read to `precision` digits.
pub fn spread_function(set: IndexSet, precision: i64) -> SharedFn {
    Func::new(Domain::Qp, move |x| spread_eval(set, precision, x))
        .with_modulus(|m| (m + 1).div_euclid(2))
        .shared()
}

/// `sum_i b_i g_{N_i}`.
pub fn spread_combination(family: &[IndexSet], coeffs: &[PadicNumber], precision: i64) -> Result<SharedFn> {
    if family.len() != coeffs.len() {
        return Err(Error::domain("one coefficient per set"));
    }
    linear_combination(
        coeffs
            .iter()
            .zip(family)
            .map(|(c, s)| (c.clone(), spread_function(*s, precision)))
            .collect(),
    )
}

type Triple = (PadicNumber, PadicNumber, PadicNumber);

/// `(p^n, 0, p^n + p^{n+})` with `n+` the next member of `cell` after `n`.
pub fn spread_triples(prime: Prime, cell: &Cell, steps: usize) -> Vec<(u64, Triple)> {
    cell.iter()
        .take(steps)
        .map(|n| {
            let next = cell.next_after(n) as i64;
            let x = PadicNumber::p_power(prime, n as i64, 1);
            let z = x.add(&PadicNumber::p_power(prime, next, 1)).expect("same prime");
            (n, (x, PadicNumber::zero(prime), z))
        })
        .collect()
}

/// Second-order probe of the combination along the cell triples.
pub fn order2_trace(
    family: &[IndexSet],
    lead: usize,
    coeffs: &[PadicNumber],
    precision: i64,
    steps: usize,
) -> Result<WitnessTrace> {
    let prime = coeffs[lead].prime();
    let g = spread_combination(family, coeffs, precision)?;
    let cell = isolating_cell(family, lead)?;
    probe_strict_order2(&*g, spread_triples(prime, &cell, steps), steps)
}

/// Pairs violating `|g(x) - g(y)| <= |x - y|^2` among `samples` random pairs.
pub fn contraction_violations(g: &SharedFn, prime: Prime, samples: u64, seed: u64) -> Result<Vec<(String, String)>> {
    let mut bad = Vec::new();
    for i in 0..samples {
        let x = random_integral(prime, seed, 2 * i, 24);
        // y agrees with x below a random position, then differs
        let cut: u32 = digit_rng(seed, 2 * i + 1).random_range(0..24);
        let tail = random_integral(prime, seed, 2 * i + 1, 24).shift(cut as i64);
        let y = x.truncation_below(cut as i64)?.add(&tail)?;
        if x.exact_eq(&y) == Some(true) {
            continue;
        }
        let lhs = g.eval(&x)?.sub(&g.eval(&y)?)?.norm()?;
        let rhs = x.sub(&y)?.norm()?.powi(2);
        if lhs > rhs {
            bad.push((x.to_string(), y.to_string()));
        }
    }
    Ok(bad)
}

pub fn entry(cfg: &ZooConfig) -> Result<ZooEntry> {
    let prime = cfg.prime;
    let precision = cfg.precision;
    let (family, lead) = cfg.family(Ground::NaturalsWithZero)?;
    let set = family[lead];
    let function = spread_function(set, precision);
    let cell = isolating_cell(&family, lead)?;

    let triple_cell = cell.clone();
    let triples = Witness::new(
        "cell-triples",
        "(p^n, 0, p^n + p^n+) for consecutive members of the cell isolating N",
        3,
        move |steps| {
            Ok(spread_triples(prime, &triple_cell, steps)
                .into_iter()
                .map(|(n, (x, y, z))| (n, vec![x, y, z]))
                .collect())
        },
    );

    let g = function.clone();
    let contraction = Claim::new(
        "contraction",
        "|g(x) - g(y)| <= |x - y|^2 on random pairs",
        move |ctx| {
            let bad = contraction_violations(&g, prime, ctx.samples, ctx.seed)?;
            Ok(ClaimReport::new(
                bad.is_empty(),
                format!("{} violations in {} pairs", bad.len(), ctx.samples),
                json!({"samples": ctx.samples, "violations": bad}),
            ))
        },
    );
    let seed = cfg.seed;
    let order2 = Claim::new(
        "order2-witness",
        "the second divided difference along the cell triples has norm |beta_1|",
        move |ctx| {
            let coeffs = random_coefficients(prime, family.len(), lead, seed ^ ctx.seed);
            let trace = order2_trace(&family, lead, &coeffs, precision, ctx.steps)?;
            let lead_norm: Norm = coeffs[lead].norm()?;
            let bad = norm_mismatches(&trace, |_| lead_norm);
            Ok(ClaimReport::new(
                bad.is_empty() && !trace.rows.is_empty(),
                format!("{} of {} rows at norm {lead_norm}", trace.rows.len() - bad.len(), trace.rows.len()),
                json!({"mismatched": bad, "trace": trace.to_json()}),
            ))
        },
    );
    let zero = constant(PadicNumber::zero(prime));
    let mut consistency = derivative_claim(function.clone(), zero.clone(), move |seed, i| {
        random_integral(prime, seed, i, 8)
    });
    consistency.name = "derivative-zero";

    Ok(ZooEntry {
        name: "digit-spread",
        description: "sum of x_n p^2n over n in N",
        function,
        derivative: Some(zero),
        witnesses: vec![triples],
        claims: vec![contraction, order2, consistency],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn single_digit_inputs() {
        let prime = p(3);
        let all = IndexSet::all(Ground::NaturalsWithZero);
        let g = spread_function(all, 32);
        let x = PadicNumber::p_power(prime, 3, 8);
        assert!(g.eval(&x).unwrap().exact_eq(&PadicNumber::p_power(prime, 6, 1)).unwrap());
        // fractional digits are ignored
        let y = PadicNumber::from_rational(1, 3, prime, 8).unwrap();
        assert!(g.eval(&y).unwrap().is_exact_zero());
    }

    #[test]
    fn positions_outside_n_vanish() {
        let prime = p(5);
        let odd = IndexSet::new(1, 0, Ground::NaturalsWithZero).unwrap();
        let g = spread_function(odd, 32);
        let x = PadicNumber::from_finite_digits(prime, 0, &[3, 0, 4, 0, 2], 8).unwrap();
        assert!(g.eval(&x).unwrap().is_exact_zero());
    }

    #[test]
    fn inexact_input_doubles_precision() {
        let prime = p(2);
        let g = spread_function(IndexSet::all(Ground::NaturalsWithZero), 32);
        let x = PadicNumber::from_digits(prime, 0, &[1, 1, 0, 1], 4).unwrap();
        let y = g.eval(&x).unwrap();
        assert_eq!(y.abs_precision(), Some(8));
        assert_eq!(y.known_digits_below(8), vec![1, 0, 1, 0, 0, 0, 1, 0]);
        // -1 has all digits p - 1
        let m = g.eval(&PadicNumber::from_integer(-1, prime, 8)).unwrap();
        assert_eq!(m.abs_precision(), Some(64));
    }

    #[test]
    fn entry_claims_pass() {
        let e = entry(&ZooConfig::new(p(3))).unwrap();
        let ctx = super::super::ClaimContext {
            steps: 12,
            samples: 200,
            ..Default::default()
        };
        for c in &e.claims {
            let r = c.run(&ctx).unwrap();
            assert!(r.passed, "{}: {}", c.name, r.summary);
        }
    }
}
