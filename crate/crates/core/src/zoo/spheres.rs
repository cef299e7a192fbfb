//! `f_N(x) = p^n` on the sphere `|x| = p^{-n^2}` for `n` in `N`, 0 elsewhere.
//!
//! Locally constant off 0, so the derivative vanishes there, but along
//! `x_n = p^{n^2}` the ratio `|f(x_n)| / |x_n|^alpha = p^{(alpha n - 1) n}` is
//! unbounded for every `alpha > 0`: no nonzero `beta f^k` is Lipschitz of any order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::json;

use super::binomial::ceil_sqrt;
use super::{random_point, Claim, ClaimReport, Witness, ZooConfig, ZooEntry};
use crate::error::{Error, Result};
use crate::families::{Ground, IndexSet};
use crate::padic::{PadicNumber, Prime};
use crate::quotient::{probe_derivative, Domain, Func, SharedFn};

fn sphere_eval(set: IndexSet, x: &PadicNumber) -> Result<PadicNumber> {
    let prime = x.prime();
    if x.is_exact_zero() {
        return Ok(PadicNumber::zero(prime));
    }
    let Some(v) = x.valuation() else {
        let k = ceil_sqrt(x.render_precision()).max(1);
        return Ok(PadicNumber::bounded_zero(prime, k));
    };
    let n = ceil_sqrt(v);
    if v >= 1 && n * n == v && set.contains(n as u64) {
        Ok(PadicNumber::p_power(prime, n, 1))
    } else {
        Ok(PadicNumber::zero(prime))
    }
}

/// The function `f_N`.
pub fn sphere_function(set: IndexSet) -> SharedFn {
    Func::new(Domain::Qp, move |x| sphere_eval(set, x))
        .with_modulus(|m| (m - 1).max(0).pow(2) + 1)
        .shared()
}

/// `f_N'(x) = 0` for `x != 0`; not differentiable at 0.
pub fn sphere_derivative(prime: Prime) -> SharedFn {
    Func::new(Domain::Qp, move |x| {
        if x.is_zero_to_precision() {
            Err(Error::NotDifferentiable)
        } else {
            Ok(PadicNumber::zero(prime))
        }
    })
    .shared()
}

/// `log_p` of `|beta f(x_n)^k| / |x_n|^alpha` along `x_n = p^{n^2}`, exactly.
pub fn ratio_exponent(
    f: &SharedFn,
    beta: &PadicNumber,
    k: u32,
    alpha: &BigRational,
    n: u64,
) -> Result<Option<BigRational>> {
    let prime = beta.prime();
    let x = PadicNumber::p_power(prime, (n * n) as i64, 1);
    let y = beta.mul(&f.eval(&x)?.powi(k as i64)?)?;
    let Some(e) = y.norm()?.exponent() else {
        return Ok(None);
    };
    let ex = x.norm()?.exponent().expect("x_n != 0");
    Ok(Some(BigRational::from_integer(BigInt::from(e)) - alpha * BigRational::from_integer(BigInt::from(ex))))
}

/// The predicted exponent `log_p|beta| + (alpha n - k) n`.
pub fn predicted_exponent(beta: &PadicNumber, k: u32, alpha: &BigRational, n: u64) -> Result<BigRational> {
    let b = beta.norm()?.exponent().ok_or_else(|| Error::domain("beta must be nonzero"))?;
    let n = BigRational::from_integer(BigInt::from(n));
    Ok(BigRational::from_integer(BigInt::from(b)) + (alpha * &n - BigRational::from_integer(BigInt::from(k))) * n)
}

fn alpha_rational(alpha: f64) -> Result<BigRational> {
    BigRational::from_float(alpha)
        .filter(|a| *a > BigRational::zero())
        .ok_or_else(|| Error::domain("alpha must be a positive finite number"))
}

/// Rows `n in N, n <= steps` where the ratio exponent differs from the prediction.
pub fn ratio_mismatches(
    f: &SharedFn,
    set: IndexSet,
    beta: &PadicNumber,
    k: u32,
    alpha: f64,
    steps: u64,
) -> Result<(Vec<serde_json::Value>, Vec<serde_json::Value>)> {
    let alpha = alpha_rational(alpha)?;
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for n in (1..=steps).filter(|&n| set.contains(n)) {
        let got = ratio_exponent(f, beta, k, &alpha, n)?;
        let want = predicted_exponent(beta, k, &alpha, n)?;
        let row = json!({"n": n, "exponent": got.as_ref().map(|g| g.to_string()),
                         "predicted": want.to_string(),
                         "log10_ratio": got.as_ref().and_then(|g| g.to_f64()).map(|g| g * beta.prime().ln() / std::f64::consts::LN_10)});
        if got.as_ref() != Some(&want) {
            bad.push(row.clone());
        }
        rows.push(row);
    }
    Ok((rows, bad))
}

fn build(cfg: &ZooConfig, set: IndexSet, name: &'static str, description: &'static str, powers: bool) -> ZooEntry {
    let prime = cfg.prime;
    let function = sphere_function(set);
    let derivative = sphere_derivative(prime);

    let witness = Witness::new("square-powers", "x_n = p^(n^2) for n in N", 1, move |steps| {
        Ok((1u64..)
            .filter(|&n| set.contains(n))
            .take(steps)
            .map(|n| (n, vec![PadicNumber::p_power(prime, (n * n) as i64, 1)]))
            .collect())
    });

    let f = function.clone();
    let one = PadicNumber::one(prime, 1);
    let ratio = Claim::new(
        "ratio-growth",
        "|f(x_n)| / |x_n|^alpha = p^((alpha n - 1) n) along x_n = p^(n^2)",
        move |ctx| {
            let steps = (ctx.steps as u64).min(40);
            let (rows, bad) = ratio_mismatches(&f, set, &one, 1, ctx.alpha, steps)?;
            Ok(ClaimReport::new(
                bad.is_empty() && !rows.is_empty(),
                format!("alpha = {}: {} of {} rows match", ctx.alpha, rows.len() - bad.len(), rows.len()),
                json!({"rows": rows, "mismatched": bad}),
            ))
        },
    );
    let mut claims = vec![ratio];
    if powers {
        let f = function.clone();
        let beta = cfg.beta.clone();
        claims.push(Claim::new(
            "power-ratio",
            "|beta f(x_n)^k| / |x_n|^alpha = |beta| p^((alpha n - k) n) for k = 1..=3",
            move |ctx| {
                let steps = (ctx.steps as u64).min(40);
                let mut all_bad = Vec::new();
                let mut count = 0;
                for k in 1..=3 {
                    let (rows, bad) = ratio_mismatches(&f, set, &beta, k, ctx.alpha, steps)?;
                    count += rows.len();
                    all_bad.extend(bad);
                }
                Ok(ClaimReport::new(
                    all_bad.is_empty() && count > 0,
                    format!("{} of {count} rows match", count - all_bad.len()),
                    json!({"mismatched": all_bad}),
                ))
            },
        ));
    }
    let f = function.clone();
    claims.push(Claim::new(
        "derivative-zero-off-0",
        "quotients at random nonzero points vanish once |h| < |x|",
        move |ctx| {
            let mut bad = Vec::new();
            let count = ctx.samples.min(1000);
            for i in 0..count {
                let x = random_point(prime, ctx.seed, i, (i % 12) as i64 - 2, 6);
                let v = x.valuation().expect("nonzero");
                let seq = (1..).map(|j: u64| (j, x.add(&PadicNumber::p_power(prime, v + j as i64, 1)).expect("same prime")));
                let trace = probe_derivative(&*f, &x, seq, 6)?;
                if !trace.rows.iter().all(|r| r.quotient.is_exact_zero()) {
                    bad.push(x.to_string());
                }
            }
            Ok(ClaimReport::new(
                bad.is_empty(),
                format!("{} of {count} points with zero quotients", count as usize - bad.len()),
                json!({"failures": bad}),
            ))
        },
    ));

    ZooEntry {
        name,
        description,
        function,
        derivative: Some(derivative),
        witnesses: vec![witness],
        claims,
    }
}

pub fn entry(cfg: &ZooConfig) -> Result<ZooEntry> {
    let set = cfg.index_set(Ground::Naturals)?;
    Ok(build(cfg, set, "square-spheres", "p^n on |x| = p^-(n^2) for n in N, else 0", false))
}

pub fn all_entry(cfg: &ZooConfig) -> Result<ZooEntry> {
    let set = IndexSet::all(Ground::Naturals);
    Ok(build(cfg, set, "square-spheres-all", "p^n on |x| = p^-(n^2) for every n >= 1, else 0", true))
}
