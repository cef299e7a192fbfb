//! A gallery of pathological p-adic functions.
//!
//! Each [`ZooEntry`] bundles a function with its derivative (when known in
//! closed form), generators for the witness points that expose its behaviour,
//! and named [`Claim`]s that re-check that behaviour on finite truncations.
//! Entries are looked up by name through [`entry`].

pub mod balls;
pub mod binomial;
pub mod ladder;
pub mod pairs;
pub mod spheres;
pub mod spikes;
pub mod spread;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::families::{generate_family, Ground, IndexSet};
use crate::haar::digit_rng;
use crate::padic::{Norm, PadicNumber, Prime, DEFAULT_PRECISION};
use crate::quotient::{derivative_deviations, SharedFn, WitnessTrace};

/// Parameters shared by all entries built from one configuration.
#[derive(Clone, Debug)]
pub struct ZooConfig {
    pub prime: Prime,
    /// Digits used when exact inputs must be rendered.
    pub precision: i64,
    /// Size `k` of the canonical independent family.
    pub family_size: u32,
    /// Which set of the family is `N` (and leads in combinations).
    pub member_bit: u32,
    /// Exponent for the binomial families; must lie in `Z_p`.
    pub beta: PadicNumber,
    /// Base point of the kink function.
    pub a: PadicNumber,
    pub seed: u64,
}

impl ZooConfig {
    pub fn new(prime: Prime) -> Self {
        ZooConfig {
            prime,
            precision: DEFAULT_PRECISION,
            family_size: 1,
            member_bit: 0,
            beta: PadicNumber::one(prime, DEFAULT_PRECISION),
            a: PadicNumber::zero(prime),
            seed: 0,
        }
    }

    /// The selected set `N` over `ground`.
    pub fn index_set(&self, ground: Ground) -> Result<IndexSet> {
        IndexSet::new(self.family_size, self.member_bit, ground)
    }

    /// The whole family and the position of `N` in it.
    pub fn family(&self, ground: Ground) -> Result<(Vec<IndexSet>, usize)> {
        self.index_set(ground)?;
        Ok((generate_family(self.family_size, ground)?, self.member_bit as usize))
    }
}

/// Knobs for running claims.
#[derive(Clone, Debug, Serialize)]
pub struct ClaimContext {
    /// Length of witness sequences.
    pub steps: usize,
    /// Number of random points or Monte Carlo samples.
    pub samples: u64,
    pub seed: u64,
    /// Digit pairs for prefix statistics.
    pub k: u32,
    /// Exponent for Lipschitz-type ratios.
    pub alpha: f64,
    /// Coefficient prefix for series criteria.
    pub n_max: u64,
}

impl Default for ClaimContext {
    fn default() -> Self {
        ClaimContext {
            steps: 40,
            samples: 10_000,
            seed: 0,
            k: 10,
            alpha: 2.0,
            n_max: 10_000,
        }
    }
}

/// Outcome of a claim.
#[derive(Clone, Debug, Serialize)]
pub struct ClaimReport {
    pub passed: bool,
    pub summary: String,
    pub details: Value,
}

impl ClaimReport {
    pub fn new(passed: bool, summary: impl Into<String>, details: Value) -> Self {
        ClaimReport {
            passed,
            summary: summary.into(),
            details,
        }
    }
}

type ClaimFn = dyn Fn(&ClaimContext) -> Result<ClaimReport> + Send + Sync;

/// A named, runnable check.
#[derive(Clone)]
pub struct Claim {
    pub name: &'static str,
    pub description: &'static str,
    run: Arc<ClaimFn>,
}

impl Claim {
    pub fn new(
        name: &'static str,
        description: &'static str,
        run: impl Fn(&ClaimContext) -> Result<ClaimReport> + Send + Sync + 'static,
    ) -> Self {
        Claim {
            name,
            description,
            run: Arc::new(run),
        }
    }

    pub fn run(&self, ctx: &ClaimContext) -> Result<ClaimReport> {
        (self.run)(ctx)
    }
}

impl fmt::Debug for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Claim").field("name", &self.name).finish()
    }
}

/// Indexed tuples of points: `(n, [x_1, ..., x_arity])`.
pub type WitnessPoints = Vec<(u64, Vec<PadicNumber>)>;
type WitnessFn = dyn Fn(usize) -> Result<WitnessPoints> + Send + Sync;

/// A named generator of witness sequences, pairs or triples.
#[derive(Clone)]
pub struct Witness {
    pub name: &'static str,
    pub description: &'static str,
    pub arity: usize,
    generate: Arc<WitnessFn>,
}

impl Witness {
    pub fn new(
        name: &'static str,
        description: &'static str,
        arity: usize,
        generate: impl Fn(usize) -> Result<WitnessPoints> + Send + Sync + 'static,
    ) -> Self {
        Witness {
            name,
            description,
            arity,
            generate: Arc::new(generate),
        }
    }

    /// The first `steps` tuples.
    pub fn generate(&self, steps: usize) -> Result<WitnessPoints> {
        (self.generate)(steps)
    }
}

impl fmt::Debug for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Witness")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .finish()
    }
}

/// A function with its derivative, witnesses and claims.
#[derive(Clone, Debug)]
pub struct ZooEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub function: SharedFn,
    pub derivative: Option<SharedFn>,
    pub witnesses: Vec<Witness>,
    pub claims: Vec<Claim>,
}

impl ZooEntry {
    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }

    pub fn witness(&self, name: &str) -> Option<&Witness> {
        self.witnesses.iter().find(|w| w.name == name)
    }

    pub fn run_claim(&self, name: &str, ctx: &ClaimContext) -> Result<ClaimReport> {
        let claim = self.claim(name).ok_or_else(|| {
            let known: Vec<&str> = self.claims.iter().map(|c| c.name).collect();
            Error::domain(format!(
                "entry `{}` has no claim `{name}` (known: {})",
                self.name,
                known.join(", ")
            ))
        })?;
        claim.run(ctx)
    }
}

/// Registered entry names.
pub const NAMES: &[&str] = &[
    "spikes",
    "digit-spread",
    "log-ladder",
    "binomial-scale",
    "kink",
    "square-spheres",
    "square-spheres-all",
    "pair-truncation",
    "pair-truncation-scaled",
    "pair-truncation-masked",
    "haar",
    "zero",
    "identity",
];

/// Builds the entry called `name`.
pub fn entry(name: &str, cfg: &ZooConfig) -> Result<ZooEntry> {
    match name {
        "spikes" => spikes::entry(cfg),
        "digit-spread" => spread::entry(cfg),
        "log-ladder" => ladder::entry(cfg),
        "binomial-scale" => binomial::scale_entry(cfg),
        "kink" => binomial::kink_entry(cfg),
        "square-spheres" => spheres::entry(cfg),
        "square-spheres-all" => spheres::all_entry(cfg),
        "pair-truncation" => pairs::truncation_entry(cfg),
        "pair-truncation-scaled" => pairs::scaled_entry(cfg),
        "pair-truncation-masked" => pairs::masked_entry(cfg),
        "haar" => pairs::haar_entry(cfg),
        "zero" => Ok(trivial_entry(cfg, false)),
        "identity" => Ok(trivial_entry(cfg, true)),
        _ => Err(Error::domain(format!(
            "unknown entry `{name}` (known: {})",
            NAMES.join(", ")
        ))),
    }
}

/// Every registered entry.
pub fn registry(cfg: &ZooConfig) -> Result<Vec<ZooEntry>> {
    NAMES.iter().map(|n| entry(n, cfg)).collect()
}

fn trivial_entry(cfg: &ZooConfig, identity: bool) -> ZooEntry {
    use crate::quotient::{constant, linear};
    use crate::vanderput::{n1_criterion, VdPSeries};

    let prime = cfg.prime;
    let one = PadicNumber::one(prime, cfg.precision);
    let (function, derivative) = if identity {
        (linear(one.clone()), constant(one))
    } else {
        (constant(PadicNumber::zero(prime)), constant(PadicNumber::zero(prime)))
    };
    let f = function.clone();
    let precision = cfg.precision;
    // The identity has derivative 1, so its coefficients must not decay.
    let (claim_name, description) = if identity {
        ("not-n1", "van der Put coefficients |a_n| n do not decay")
    } else {
        ("n1-trend", "van der Put coefficients |a_n| n decay")
    };
    let claim = Claim::new(claim_name, description, move |ctx| {
        let series = VdPSeries::new(f.clone(), prime, precision);
        let report = n1_criterion(&series, ctx.n_max.clamp(2, 1 << 16))?;
        let passed = report.decaying != identity;
        Ok(ClaimReport::new(
            passed,
            format!("decaying = {}", report.decaying),
            json!(report),
        ))
    });
    ZooEntry {
        name: if identity { "identity" } else { "zero" },
        description: if identity { "x -> x" } else { "x -> 0" },
        function,
        derivative: Some(derivative),
        witnesses: Vec::new(),
        claims: vec![claim],
    }
}

// -------------------------------------------------------------------------
// shared helpers
// -------------------------------------------------------------------------

/// An exact random point `sum_{i<len} d_i p^(valuation+i)` with `d_0 != 0`.
pub fn random_point(prime: Prime, seed: u64, index: u64, valuation: i64, len: usize) -> PadicNumber {
    let mut rng = digit_rng(seed, index);
    let p = prime.get();
    let mut digits: Vec<u32> = (0..len.max(1)).map(|_| rng.random_range(0..p)).collect();
    digits[0] = rng.random_range(1..p);
    PadicNumber::from_finite_digits(prime, valuation, &digits, (valuation + len as i64).max(1))
        .expect("digits below p")
}

/// An exact random element of `Z_p` with `len` digits (possibly zero).
pub fn random_integral(prime: Prime, seed: u64, index: u64, len: usize) -> PadicNumber {
    let mut rng = digit_rng(seed, index);
    let p = prime.get();
    let digits: Vec<u32> = (0..len).map(|_| rng.random_range(0..p)).collect();
    PadicNumber::from_finite_digits(prime, 0, &digits, len.max(1) as i64).expect("digits below p")
}

/// `count` random nonzero integer coefficients in `[1, p^3)`; the one at
/// `unit_at` is coprime to `p`.
pub fn random_coefficients(prime: Prime, count: usize, unit_at: usize, seed: u64) -> Vec<PadicNumber> {
    let mut rng = digit_rng(seed, u64::MAX);
    let p = prime.get() as u64;
    let bound = p * p * p;
    (0..count)
        .map(|i| {
            let c = loop {
                let c = rng.random_range(1..bound);
                if i != unit_at || c % p != 0 {
                    break c;
                }
            };
            PadicNumber::from_integer(BigInt::from(c), prime, DEFAULT_PRECISION)
        })
        .collect()
}

/// Rows whose norm differs from `expected(index)`.
pub fn norm_mismatches(trace: &WitnessTrace, expected: impl Fn(u64) -> Norm) -> Vec<Value> {
    trace
        .rows
        .iter()
        .filter(|r| r.norm != expected(r.index))
        .map(|r| json!({"index": r.index, "norm": r.norm, "expected": expected(r.index)}))
        .collect()
}

/// Outcome of comparing finite differences with a derivative at one point.
#[derive(Clone, Debug, Serialize)]
pub struct DerivativeCheck {
    pub point: String,
    /// `(|h|, |Phi_1 f(x, x+h) - f'(x)|)` for shrinking `h`.
    pub deviations: Vec<(Norm, Norm)>,
    pub passed: bool,
}

/// First step exponent that is past the digit structure of `x`.
pub fn step_start(x: &PadicNumber) -> i64 {
    let top = x
        .finite_expansion()
        .map(|(v, d)| v + d.len() as i64)
        .unwrap_or(0);
    2 * top.abs().max(x.valuation().unwrap_or(0).abs()) + 2
}

/// `|Phi_1 f(x, x + p^j) - f'(x)|` for `j` from [`step_start`] on. The
/// largest deviation over the second half of the steps must vanish or sit
/// strictly below the largest over the first half.
pub fn check_derivative_at(f: &SharedFn, df: &SharedFn, x: &PadicNumber, steps: usize) -> Result<DerivativeCheck> {
    let prime = x.prime();
    let j0 = step_start(x);
    let hs: Vec<PadicNumber> = (0..steps as i64)
        .map(|j| PadicNumber::p_power(prime, j0 + j, DEFAULT_PRECISION))
        .collect();
    let deviations = derivative_deviations(&**f, &**df, x, &hs)?;
    let sup = |d: &[(Norm, Norm)]| d.iter().map(|r| r.1).fold(Norm::Zero, Norm::max);
    let (head, tail) = deviations.split_at(deviations.len() / 2);
    let tail_sup = sup(tail);
    Ok(DerivativeCheck {
        point: x.to_string(),
        passed: tail_sup.is_zero() || tail_sup < sup(head),
        deviations,
    })
}

/// [`check_derivative_at`] over `points`.
pub fn derivative_consistency(f: &SharedFn, df: &SharedFn, points: &[PadicNumber], steps: usize) -> Result<ClaimReport> {
    let checks: Vec<DerivativeCheck> = points
        .iter()
        .map(|x| check_derivative_at(f, df, x, steps))
        .collect::<Result<_>>()?;
    let failures: Vec<&DerivativeCheck> = checks.iter().filter(|c| !c.passed).collect();
    Ok(ClaimReport::new(
        failures.is_empty(),
        format!("{} of {} base points consistent", checks.len() - failures.len(), checks.len()),
        json!({"points": checks.len(), "failures": failures}),
    ))
}

/// Standard derivative-consistency claim over random points from `points`.
pub(crate) fn derivative_claim(
    f: SharedFn,
    df: SharedFn,
    points: impl Fn(u64, u64) -> PadicNumber + Send + Sync + 'static,
) -> Claim {
    Claim::new(
        "derivative-consistency",
        "finite differences approach the stated derivative at random points",
        move |ctx| {
            let count = ctx.samples.min(100);
            let pts: Vec<PadicNumber> = (0..count).map(|i| points(ctx.seed, i)).collect();
            derivative_consistency(&f, &df, &pts, ctx.steps.clamp(2, 24))
        },
    )
}
