//! `f_N(x) = p^{2n}` on the ball `|x - p^n| < p^{-2n}` for `n` in `N`, 0 elsewhere.
//!
//! Each `f_N` is strictly differentiable with derivative 0 everywhere but not
//! strictly differentiable at 0 (nor is any nonzero combination over an
//! independent family): the pairs `(p^n, p^n - p^{2n})` have quotient exactly
//! the coefficient of the set isolated by `n`.

use serde_json::json;

use super::balls::sphere_point_balls;
use super::{
    derivative_claim, norm_mismatches, random_coefficients, random_point, Claim, ClaimReport,
    Witness, ZooConfig, ZooEntry,
};
use crate::error::{Error, Result};
use crate::families::{isolating_cell, Cell, Ground, IndexSet};
use crate::padic::{Norm, PadicNumber, Prime};
use crate::quotient::{
    constant, linear_combination, probe_derivative, probe_strict, Domain, Func, SharedFn,
    WitnessTrace,
};

/// `v(d) >= k`, or an error if the known digits cannot tell.
pub(crate) fn valuation_at_least(d: &PadicNumber, k: i64) -> Result<bool> {
    if d.is_exact_zero() {
        return Ok(true);
    }
    match d.valuation() {
        Some(v) => Ok(v >= k),
        None if d.render_precision() >= k => Ok(true),
        None => Err(Error::precision_needed(k, format!("deciding v(x) >= {k}"))),
    }
}

fn spike_eval(set: IndexSet, x: &PadicNumber) -> Result<PadicNumber> {
    let prime = x.prime();
    if x.is_exact_zero() {
        return Ok(PadicNumber::zero(prime));
    }
    let Some(n) = x.valuation() else {
        // Only balls with n >= max(N_x, 1) remain possible.
        return Ok(PadicNumber::bounded_zero(prime, 2 * x.render_precision().max(1)));
    };
    if n < 1 || !set.contains(n as u64) {
        return Ok(PadicNumber::zero(prime));
    }
    let centre = PadicNumber::p_power(prime, n, 2 * n + 1);
    if valuation_at_least(&x.sub(&centre)?, 2 * n + 1)? {
        Ok(PadicNumber::p_power(prime, 2 * n, 2 * n + 1))
    } else {
        Ok(PadicNumber::zero(prime))
    }
}

/// The function `f_N`.
pub fn spike_function(set: IndexSet) -> SharedFn {
    Func::new(Domain::Qp, move |x| spike_eval(set, x))
        .with_modulus(|m| m + 1)
        .shared()
}

/// `sum_i c_i f_{N_i}`.
pub fn spike_combination(family: &[IndexSet], coeffs: &[PadicNumber]) -> Result<SharedFn> {
    if family.len() != coeffs.len() {
        return Err(Error::domain("one coefficient per set"));
    }
    linear_combination(
        coeffs
            .iter()
            .zip(family)
            .map(|(c, s)| (c.clone(), spike_function(*s)))
            .collect(),
    )
}

/// `(p^n, p^n - p^{2n})` for the first `steps` members `n` of `cell`.
pub fn spike_pairs(prime: Prime, cell: &Cell, steps: usize) -> Vec<(u64, (PadicNumber, PadicNumber))> {
    cell.iter()
        .take(steps)
        .map(|n| {
            let n = n as i64;
            let x = PadicNumber::p_power(prime, n, 2 * n + 1);
            let y = x
                .sub(&PadicNumber::p_power(prime, 2 * n, 2 * n + 1))
                .expect("same prime");
            (n as u64, (x, y))
        })
        .collect()
}

/// Strict-differentiability probe of the combination at 0.
pub fn strict_trace(family: &[IndexSet], lead: usize, coeffs: &[PadicNumber], steps: usize) -> Result<WitnessTrace> {
    let prime = coeffs[lead].prime();
    let f = spike_combination(family, coeffs)?;
    let cell = isolating_cell(family, lead)?;
    probe_strict(&*f, spike_pairs(prime, &cell, steps), steps)
}

/// Derivative probe of the combination at 0 along `p^n`, `n` in the isolating cell.
pub fn zero_trace(family: &[IndexSet], lead: usize, coeffs: &[PadicNumber], steps: usize) -> Result<WitnessTrace> {
    let prime = coeffs[lead].prime();
    let f = spike_combination(family, coeffs)?;
    let cell = isolating_cell(family, lead)?;
    let seq = cell
        .iter()
        .map(move |n| (n, PadicNumber::p_power(prime, n as i64, 2 * n as i64 + 1)));
    probe_derivative(&*f, &PadicNumber::zero(prime), seq, steps)
}

pub fn entry(cfg: &ZooConfig) -> Result<ZooEntry> {
    let prime = cfg.prime;
    let (family, lead) = cfg.family(Ground::Naturals)?;
    let set = family[lead];
    let function = spike_function(set);
    let cell = isolating_cell(&family, lead)?;

    let pair_cell = cell.clone();
    let pairs = Witness::new(
        "cell-pairs",
        "(p^n, p^n - p^2n) for n in the cell isolating N",
        2,
        move |steps| {
            Ok(spike_pairs(prime, &pair_cell, steps)
                .into_iter()
                .map(|(n, (x, y))| (n, vec![x, y]))
                .collect())
        },
    );
    let seq_cell = cell.clone();
    let approach = Witness::new("zero-approach", "p^n for n in the cell isolating N", 1, move |steps| {
        Ok(seq_cell
            .iter()
            .take(steps)
            .map(|n| (n, vec![PadicNumber::p_power(prime, n as i64, 1)]))
            .collect())
    });

    let seed = cfg.seed;
    let (fam1, fam2) = (family.clone(), family.clone());
    let strict = Claim::new(
        "strict-fail",
        "quotients along the cell pairs equal the leading coefficient, not the derivative 0",
        move |ctx| {
            let coeffs = random_coefficients(prime, fam1.len(), lead, seed ^ ctx.seed);
            let trace = strict_trace(&fam1, lead, &coeffs, ctx.steps)?;
            let alpha = &coeffs[lead];
            let bad: Vec<u64> = trace
                .rows
                .iter()
                .filter(|r| r.quotient.exact_eq(alpha) != Some(true))
                .map(|r| r.index)
                .collect();
            Ok(ClaimReport::new(
                bad.is_empty() && !trace.rows.is_empty(),
                format!("quotient = {alpha} on {} of {} pairs", trace.rows.len() - bad.len(), trace.rows.len()),
                json!({"coefficients": coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                       "mismatched": bad, "trace": trace.to_json()}),
            ))
        },
    );
    let derivative = Claim::new(
        "derivative-zero",
        "difference quotients at 0 along p^n have norm |alpha_1| p^-n and tend to 0",
        move |ctx| {
            let coeffs = random_coefficients(prime, fam2.len(), lead, seed ^ ctx.seed);
            let trace = zero_trace(&fam2, lead, &coeffs, ctx.steps)?;
            let lead_norm = coeffs[lead].norm()?;
            let bad = norm_mismatches(&trace, |n| lead_norm * Norm::from_valuation(prime.get(), n as i64));
            let to_zero = trace.verdict.converges_to_value(&PadicNumber::zero(prime));
            Ok(ClaimReport::new(
                bad.is_empty() && to_zero,
                format!("verdict {}, {} norm mismatches", trace.verdict.kind(), bad.len()),
                json!({"mismatched": bad, "trace": trace.to_json()}),
            ))
        },
    );
    let disjoint = Claim::new(
        "disjoint-balls",
        "the balls |x - p^n| < p^-2n are pairwise disjoint",
        move |ctx| {
            let count = ctx.steps.max(50) as u64;
            let ok = sphere_point_balls(prime, count).pairwise_disjoint()?;
            Ok(ClaimReport::new(ok, format!("checked {count} balls"), json!({"count": count})))
        },
    );
    let zero = constant(PadicNumber::zero(prime));
    let consistency = derivative_claim(function.clone(), zero.clone(), move |seed, i| {
        random_point(prime, seed, i, (i % 7) as i64 - 2, 6)
    });

    Ok(ZooEntry {
        name: "spikes",
        description: "p^2n on the ball |x - p^n| < p^-2n for n in N, else 0",
        function,
        derivative: Some(zero),
        witnesses: vec![pairs, approach],
        claims: vec![strict, derivative, disjoint, consistency],
    })
}
