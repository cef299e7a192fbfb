//! Functions built from binomial powers `(1 + y)^beta`.
//!
//! * `f_beta(x) = p^{-n} (1 + y)^beta` when `x = sum_{k=-n}^{0} a_k p^k + y` with
//!   `a_{-n} != 0` and `y` in `pZ_p`, and `f_beta = 0` on `pZ_p`. It is
//!   differentiable everywhere with `|f_beta'(p^{-n})| = |beta| p^n`, unbounded.
//! * Polynomials without constant term in several `f_{h_i}` stay in that class;
//!   their derivative grows like `p^{n k~_1}`.
//! * `g_beta(x) = p^n (p^{-n^2}(x - a))^beta` on `a + p^{n^2} + p^{n^2+1} Z_p`, 0
//!   elsewhere, and `F_beta = f_beta + g_beta` is continuous everywhere and
//!   differentiable everywhere except at `a`.

use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::json;

use super::{
    derivative_claim, norm_mismatches, random_point, Claim, ClaimReport, Witness, ZooConfig, ZooEntry,
};
use crate::error::{Error, Result};
use crate::padic::{pow_one_plus, Norm, PadicNumber, Prime};
use crate::quotient::{probe_derivative, Domain, Func, PadicFunction, SharedFn, TraceRow, WitnessTrace};

/// Digits worth of output for exact inputs whose result is not exact.
fn output_precision(x: &PadicNumber, precision: i64) -> i64 {
    if x.is_exact() {
        precision
    } else {
        x.render_precision()
    }
}

fn check_beta(beta: &PadicNumber) -> Result<()> {
    if beta.is_zero_to_precision() || !beta.is_integral() {
        return Err(Error::domain("beta must be a nonzero element of Z_p"));
    }
    Ok(())
}

/// `(n, y)` with `x = p^{-n}`-scaled head plus `y` in `pZ_p`, for `v(x) <= 0`;
/// `None` when `x` lies in `pZ_p`.
fn decompose(x: &PadicNumber) -> Result<Option<(i64, PadicNumber)>> {
    if x.is_exact_zero() {
        return Ok(None);
    }
    match x.valuation() {
        Some(v) if v >= 1 => Ok(None),
        Some(v) => {
            // head = sum_{k=v}^{0} x_k p^k, exact
            let (frac, rest) = x.split_fraction()?;
            let head = frac.add(&PadicNumber::from_integer(rest.digit(0)?, x.prime(), 1))?;
            Ok(Some((-v, x.sub(&head)?)))
        }
        None if x.render_precision() >= 1 => Ok(None),
        None => Err(Error::precision_needed(1, "is x in pZ_p?")),
    }
}

fn scale_eval(beta: &PadicNumber, precision: i64, x: &PadicNumber) -> Result<PadicNumber> {
    let prime = x.prime();
    let Some((n, y)) = decompose(x)? else {
        return Ok(PadicNumber::zero(prime));
    };
    let prec = output_precision(x, precision);
    Ok(pow_one_plus(&y, beta, prec + n)?.shift(-n))
}

fn scale_derivative_eval(beta: &PadicNumber, precision: i64, x: &PadicNumber) -> Result<PadicNumber> {
    let prime = x.prime();
    let Some((n, y)) = decompose(x)? else {
        return Ok(PadicNumber::zero(prime));
    };
    let prec = output_precision(x, precision);
    let beta_minus_one = beta.sub(&PadicNumber::one(prime, prec))?;
    Ok(pow_one_plus(&y, &beta_minus_one, prec + n)?.mul(beta)?.shift(-n))
}

/// `f_beta`.
pub fn scale_function(beta: PadicNumber, precision: i64) -> Result<SharedFn> {
    check_beta(&beta)?;
    Ok(Func::new(Domain::Qp, move |x| scale_eval(&beta, precision, x)).shared())
}

/// `f_beta'(x) = p^{-n} beta (1 + y)^{beta - 1}` (0 on `pZ_p`).
pub fn scale_derivative(beta: PadicNumber, precision: i64) -> Result<SharedFn> {
    check_beta(&beta)?;
    Ok(Func::new(Domain::Qp, move |x| scale_derivative_eval(&beta, precision, x)).shared())
}

/// `x_n = p^{-n} + y` for `n = 1, 2, ...`.
pub fn scale_sequence(prime: Prime, y: &PadicNumber, steps: usize) -> Result<Vec<(u64, PadicNumber)>> {
    (1..=steps as i64)
        .map(|n| Ok((n as u64, PadicNumber::p_power(prime, -n, 1).add(y)?)))
        .collect()
}

/// Trace of `f'(x_n)` along [`scale_sequence`] (the "quotient" column holds the derivative).
pub fn derivative_trace(df: &dyn PadicFunction, points: Vec<(u64, PadicNumber)>) -> Result<WitnessTrace> {
    let rows = points
        .into_iter()
        .map(|(n, x)| {
            let d = df.eval(&x)?;
            Ok(TraceRow {
                index: n,
                norm: d.norm()?,
                inputs: vec![x],
                quotient: d,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessTrace::from_rows(rows))
}

pub fn scale_entry(cfg: &ZooConfig) -> Result<ZooEntry> {
    let prime = cfg.prime;
    let precision = cfg.precision;
    let beta = cfg.beta.clone();
    let function = scale_function(beta.clone(), precision)?;
    let derivative = scale_derivative(beta.clone(), precision)?;

    let witness = Witness::new("inverse-powers", "x_n = p^-n", 1, move |steps| {
        Ok(scale_sequence(prime, &PadicNumber::zero(prime), steps)?
            .into_iter()
            .map(|(n, x)| (n, vec![x]))
            .collect())
    });

    let df = derivative.clone();
    let beta_norm = beta.norm()?;
    let unbounded = Claim::new(
        "unbounded-derivative",
        "|f'(p^-n + y)| = |beta| p^n for y in pZ_p",
        move |ctx| {
            let y = random_point(prime, ctx.seed, 0, 1, 6);
            let trace = derivative_trace(&*df, scale_sequence(prime, &y, ctx.steps)?)?;
            let bad = norm_mismatches(&trace, |n| beta_norm * Norm::power(prime.get(), n as i64));
            Ok(ClaimReport::new(
                bad.is_empty() && trace.verdict.kind() == "diverges",
                format!("verdict {}, {} norm mismatches", trace.verdict.kind(), bad.len()),
                json!({"y": y.to_string(), "mismatched": bad, "trace": trace.to_json()}),
            ))
        },
    );
    let mut probe = derivative_claim(function.clone(), derivative.clone(), move |seed, i| {
        random_point(prime, seed, i, -((i % 4) as i64), 6)
    });
    probe.name = "derivative-probe";
    let f = function.clone();
    let zero_on_pzp = Claim::new("zero-on-pZp", "f vanishes on pZ_p", move |ctx| {
        let mut bad = Vec::new();
        for i in 0..ctx.samples.min(1000) {
            let x = random_point(prime, ctx.seed, i, 1 + (i % 5) as i64, 8);
            if !f.eval(&x)?.is_exact_zero() {
                bad.push(x.to_string());
            }
        }
        let bz = f.eval(&PadicNumber::bounded_zero(prime, 3))?;
        Ok(ClaimReport::new(
            bad.is_empty() && bz.is_exact_zero(),
            format!("{} nonzero values", bad.len()),
            json!({"nonzero": bad}),
        ))
    });

    Ok(ZooEntry {
        name: "binomial-scale",
        description: "p^-n (1+y)^beta for x = p^-n-scaled head + y, 0 on pZ_p",
        function,
        derivative: Some(derivative),
        witnesses: vec![witness],
        claims: vec![unbounded, probe, zero_on_pzp],
    })
}

// -------------------------------------------------------------------------
// polynomial combinations
// -------------------------------------------------------------------------

/// One term `coeff * x_1^{k_1} ... x_m^{k_m}`.
#[derive(Clone, Debug)]
pub struct Monomial {
    pub coeff: PadicNumber,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// A polynomial without constant term in `vars` variables.
#[derive(Clone, Debug)]
pub struct Polynomial {
    pub vars: usize,
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    /// Checks: nonzero coefficients, pairwise distinct exponent tuples, no constant term.
    pub fn new(vars: usize, terms: Vec<Monomial>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::domain("empty polynomial"));
        }
        for (i, t) in terms.iter().enumerate() {
            if t.exponents.len() != vars {
                return Err(Error::domain("exponent tuple of the wrong length"));
            }
            if t.degree() == 0 {
                return Err(Error::domain("constant terms are not allowed"));
            }
            if t.coeff.is_zero_to_precision() {
                return Err(Error::domain("zero coefficient"));
            }
            if terms[..i].iter().any(|s| s.exponents == t.exponents) {
                return Err(Error::domain("repeated exponent tuple"));
            }
        }
        Ok(Polynomial { vars, terms })
    }

    /// `P(x) = x`.
    pub fn identity(prime: Prime) -> Self {
        Polynomial {
            vars: 1,
            terms: vec![Monomial {
                coeff: PadicNumber::one(prime, 1),
                exponents: vec![1],
            }],
        }
    }

    fn is_identity(&self) -> bool {
        self.vars == 1
            && self.terms.len() == 1
            && self.terms[0].exponents == [1]
            && self.terms[0].coeff.exact_eq(&PadicNumber::one(self.terms[0].coeff.prime(), 1)) == Some(true)
    }

    fn eval_at(&self, values: &[PadicNumber]) -> Result<PadicNumber> {
        let prime = values[0].prime();
        let mut acc = PadicNumber::zero(prime);
        for t in &self.terms {
            let mut m = t.coeff.clone();
            for (v, &k) in values.iter().zip(&t.exponents) {
                if k > 0 {
                    m = m.mul(&v.powi(k as i64)?)?;
                }
            }
            acc = acc.add(&m)?;
        }
        Ok(acc)
    }

    /// Chain rule: `sum_r c_r sum_i k_i v_i^{k_i - 1} d_i prod_{j != i} v_j^{k_j}`.
    fn derivative_at(&self, values: &[PadicNumber], derivs: &[PadicNumber]) -> Result<PadicNumber> {
        let prime = values[0].prime();
        let mut acc = PadicNumber::zero(prime);
        for t in &self.terms {
            for (i, &ki) in t.exponents.iter().enumerate() {
                if ki == 0 {
                    continue;
                }
                let mut m = t
                    .coeff
                    .mul(&PadicNumber::from_integer(ki, prime, 1))?
                    .mul(&derivs[i])?;
                for (j, (v, &kj)) in values.iter().zip(&t.exponents).enumerate() {
                    let k = if i == j { kj - 1 } else { kj };
                    if k > 0 {
                        m = m.mul(&v.powi(k as i64)?)?;
                    }
                }
                acc = acc.add(&m)?;
            }
        }
        Ok(acc)
    }
}

/// `P(f_1, ..., f_m)` with derivative by the chain rule when every entry has one.
pub fn poly_combine(entries: &[ZooEntry], poly: &Polynomial) -> Result<ZooEntry> {
    if entries.len() != poly.vars {
        return Err(Error::domain("one entry per polynomial variable"));
    }
    if poly.is_identity() {
        return Ok(entries[0].clone());
    }
    let fs: Arc<Vec<SharedFn>> = Arc::new(entries.iter().map(|e| e.function.clone()).collect());
    let domain = if fs.iter().any(|f| f.domain() == Domain::Zp) {
        Domain::Zp
    } else {
        Domain::Qp
    };
    let p1 = poly.clone();
    let f1 = Arc::clone(&fs);
    let function = Func::new(domain, move |x| {
        let values = f1.iter().map(|f| f.eval(x)).collect::<Result<Vec<_>>>()?;
        p1.eval_at(&values)
    })
    .shared();
    let derivative = if entries.iter().all(|e| e.derivative.is_some()) {
        let dfs: Vec<SharedFn> = entries.iter().map(|e| e.derivative.clone().expect("checked")).collect();
        let p2 = poly.clone();
        Some(
            Func::new(domain, move |x| {
                let values = fs.iter().map(|f| f.eval(x)).collect::<Result<Vec<_>>>()?;
                let derivs = dfs.iter().map(|f| f.eval(x)).collect::<Result<Vec<_>>>()?;
                p2.derivative_at(&values, &derivs)
            })
            .shared(),
        )
    } else {
        None
    };
    Ok(ZooEntry {
        name: "polynomial",
        description: "polynomial without constant term in other entries",
        function,
        derivative,
        witnesses: Vec::new(),
        claims: Vec::new(),
    })
}

/// Surrogate for linearly independent exponents: `h_i = p^i`, `i = 1..=m`.
pub fn surrogate_exponents(prime: Prime, m: usize) -> Vec<PadicNumber> {
    (1..=m as i64).map(|i| PadicNumber::p_power(prime, i, 1)).collect()
}

/// `beta_r = sum_i k_{r,i} h_i` for each term; rejects the instance unless
/// they are pairwise distinct and nonzero.
pub fn aggregate_exponents(poly: &Polynomial, h: &[PadicNumber]) -> Result<Vec<PadicNumber>> {
    let prime = h[0].prime();
    let betas = poly
        .terms
        .iter()
        .map(|t| {
            t.exponents.iter().zip(h).try_fold(PadicNumber::zero(prime), |acc, (&k, hi)| {
                acc.add(&hi.mul(&PadicNumber::from_integer(k, prime, 1))?)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for (i, b) in betas.iter().enumerate() {
        if b.valuation().is_none() {
            return Err(Error::domain(format!("aggregate exponent {i} is not known to be nonzero")));
        }
        for c in &betas[..i] {
            if b.sub(c)?.valuation().is_none() {
                return Err(Error::domain("aggregate exponents are not pairwise distinct"));
            }
        }
    }
    Ok(betas)
}

/// Result of [`check_nonconstant_combination`].
#[derive(Clone, Debug)]
pub enum Nonconstant {
    /// `y` with `sum gamma_i (1+y)^alpha_i != sum gamma_i`.
    Witness(PadicNumber),
    /// Search budget exhausted; inconclusive.
    NotFound,
}

/// `sum_i gammas[i] (1 + y)^alphas[i]`.
pub fn binomial_sum(gammas: &[PadicNumber], alphas: &[PadicNumber], y: &PadicNumber, precision: i64) -> Result<PadicNumber> {
    let prime = y.prime();
    gammas.iter().zip(alphas).try_fold(PadicNumber::zero(prime), |acc, (g, a)| {
        acc.add(&g.mul(&pow_one_plus(y, a, precision)?)?)
    })
}

/// Searches `y = sum_{i=1}^{depth} d_i p^i` in increasing order for a point
/// where the combination differs from its value at 0.
pub fn check_nonconstant_combination(
    gammas: &[PadicNumber],
    alphas: &[PadicNumber],
    search_depth: u32,
    precision: i64,
) -> Result<Nonconstant> {
    if gammas.is_empty() || gammas.len() != alphas.len() {
        return Err(Error::domain("need equally many coefficients and exponents"));
    }
    if gammas.iter().any(|g| g.is_zero_to_precision()) {
        return Err(Error::domain("coefficients must be nonzero"));
    }
    for (i, a) in alphas.iter().enumerate() {
        if !a.is_integral() {
            return Err(Error::domain("exponents must lie in Z_p"));
        }
        for b in &alphas[..i] {
            if a.sub(b)?.valuation().is_none() {
                return Err(Error::domain("exponents must be pairwise distinct"));
            }
        }
    }
    let prime = gammas[0].prime();
    let at_zero = gammas.iter().try_fold(PadicNumber::zero(prime), |acc, g| acc.add(g))?;
    let count = prime.pow(search_depth as u64);
    let mut k = BigInt::from(1);
    while k < BigInt::from(count.clone()) {
        let y = PadicNumber::from_integer(k.clone(), prime, precision).shift(1);
        let diff = binomial_sum(gammas, alphas, &y, precision)?.sub(&at_zero)?;
        if diff.valuation().is_some() {
            return Ok(Nonconstant::Witness(y));
        }
        k += 1;
    }
    Ok(Nonconstant::NotFound)
}

/// A point `y` in `pZ_p` where `sum gammas[i] (1+y)^alphas[i]` is nonzero.
pub fn find_nonvanishing(
    gammas: &[PadicNumber],
    alphas: &[PadicNumber],
    search_depth: u32,
    precision: i64,
) -> Result<Option<PadicNumber>> {
    let prime = gammas[0].prime();
    let at_zero = gammas.iter().try_fold(PadicNumber::zero(prime), |acc, g| acc.add(g))?;
    if at_zero.valuation().is_some() {
        return Ok(Some(PadicNumber::zero(prime)));
    }
    // The sum vanishes at 0, so any point where it is not constant will do.
    match check_nonconstant_combination(gammas, alphas, search_depth, precision)? {
        Nonconstant::Witness(y) => Ok(Some(y)),
        Nonconstant::NotFound => Ok(None),
    }
}

/// A polynomial in `f_{h_1}, ..., f_{h_m}` with its closed-form derivative data.
pub struct ScaleAlgebra {
    pub poly: Polynomial,
    pub h: Vec<PadicNumber>,
    pub betas: Vec<PadicNumber>,
    pub entry: ZooEntry,
    precision: i64,
}

/// Terms grouped by total degree, highest first: `(k~_q, [(alpha, beta)])`.
pub type DegreeGroups = Vec<(u32, Vec<(PadicNumber, PadicNumber)>)>;

impl ScaleAlgebra {
    pub fn new(prime: Prime, poly: Polynomial, precision: i64) -> Result<Self> {
        let h = surrogate_exponents(prime, poly.vars);
        let betas = aggregate_exponents(&poly, &h)?;
        let entries = h
            .iter()
            .map(|hi| {
                let mut cfg = ZooConfig::new(prime);
                cfg.beta = hi.clone();
                cfg.precision = precision;
                scale_entry(&cfg)
            })
            .collect::<Result<Vec<_>>>()?;
        let entry = poly_combine(&entries, &poly)?;
        Ok(ScaleAlgebra {
            poly,
            h,
            betas,
            entry,
            precision,
        })
    }

    pub fn groups(&self) -> DegreeGroups {
        let mut groups: DegreeGroups = Vec::new();
        for (t, b) in self.poly.terms.iter().zip(&self.betas) {
            let d = t.degree();
            match groups.iter_mut().find(|g| g.0 == d) {
                Some(g) => g.1.push((t.coeff.clone(), b.clone())),
                None => groups.push((d, vec![(t.coeff.clone(), b.clone())])),
            }
        }
        groups.sort_by_key(|g| std::cmp::Reverse(g.0));
        groups
    }

    /// `S_q(y) = sum_s alpha_{q,s} beta_{q,s} (1+y)^{beta_{q,s} - 1}` for each group.
    pub fn group_sums(&self, y: &PadicNumber) -> Result<Vec<(u32, PadicNumber)>> {
        let prime = y.prime();
        self.groups()
            .into_iter()
            .map(|(d, terms)| {
                let gammas = terms.iter().map(|(a, b)| a.mul(b)).collect::<Result<Vec<_>>>()?;
                let alphas = terms
                    .iter()
                    .map(|(_, b)| b.sub(&PadicNumber::one(prime, 1)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((d, binomial_sum(&gammas, &alphas, y, self.precision)?))
            })
            .collect()
    }

    /// `y_1` in `pZ_p` with `S_1(y_1) != 0`, by search up to `depth`.
    pub fn leading_witness(&self, depth: u32) -> Result<Option<PadicNumber>> {
        let prime = self.h[0].prime();
        let (_, lead) = self.groups().into_iter().next().expect("nonempty polynomial");
        let gammas = lead.iter().map(|(a, b)| a.mul(b)).collect::<Result<Vec<_>>>()?;
        let alphas = lead
            .iter()
            .map(|(_, b)| b.sub(&PadicNumber::one(prime, 1)))
            .collect::<Result<Vec<_>>>()?;
        find_nonvanishing(&gammas, &alphas, depth, self.precision)
    }

    /// Smallest `n0 >= 1` from which the top-degree group dominates the derivative at `p^-n + y`.
    pub fn dominance_start(&self, y: &PadicNumber) -> Result<i64> {
        let sums = self.group_sums(y)?;
        let (k1, s1) = &sums[0];
        let v1 = s1
            .valuation()
            .ok_or_else(|| Error::domain("leading group sum vanishes at y"))?;
        let mut n0 = 1;
        for (kq, sq) in &sums[1..] {
            if sq.is_exact_zero() {
                continue;
            }
            // v(S_q) >= its known zero digits when S_q is a bounded zero
            let vq = sq.valuation().unwrap_or_else(|| sq.render_precision());
            let gap = (*k1 - *kq) as i64;
            n0 = n0.max((v1 - vq).div_euclid(gap) + 1);
        }
        Ok(n0)
    }

    /// Closed-form derivative `sum_q p^{-n k~_q} S_q(y)` at `p^-n + y`.
    pub fn closed_form_derivative(&self, n: i64, y: &PadicNumber) -> Result<PadicNumber> {
        let prime = y.prime();
        self.group_sums(y)?
            .into_iter()
            .try_fold(PadicNumber::zero(prime), |acc, (d, s)| acc.add(&s.shift(-n * d as i64)))
    }
}

// -------------------------------------------------------------------------
// the kink at a
// -------------------------------------------------------------------------

fn integer_sqrt(v: i64) -> Option<i64> {
    if v < 1 {
        return None;
    }
    let r = (v as f64).sqrt().round() as i64;
    (r * r == v).then_some(r)
}

/// Smallest `r >= 0` with `r^2 >= v`.
pub(crate) fn ceil_sqrt(v: i64) -> i64 {
    if v <= 0 {
        return 0;
    }
    let mut r = (v as f64).sqrt() as i64;
    while r * r < v {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= v {
        r -= 1;
    }
    r
}

fn kink_part_eval(beta: &PadicNumber, a: &PadicNumber, precision: i64, x: &PadicNumber) -> Result<PadicNumber> {
    let prime = x.prime();
    let t = x.sub(a)?;
    if t.is_exact_zero() {
        return Ok(PadicNumber::zero(prime));
    }
    let Some(v) = t.valuation() else {
        let k = ceil_sqrt(t.render_precision()).max(1);
        return Ok(PadicNumber::bounded_zero(prime, k));
    };
    let Some(n) = integer_sqrt(v) else {
        return Ok(PadicNumber::zero(prime));
    };
    if t.digit(v)? != 1 {
        return Ok(PadicNumber::zero(prime));
    }
    let prec = output_precision(&t, precision + v) - v;
    let y = t.shift(-v).sub(&PadicNumber::one(prime, prec.max(1)))?;
    Ok(pow_one_plus(&y, beta, prec.max(1))?.shift(n))
}

fn kink_part_derivative(beta: &PadicNumber, a: &PadicNumber, precision: i64, x: &PadicNumber) -> Result<PadicNumber> {
    let prime = x.prime();
    let t = x.sub(a)?;
    if t.is_zero_to_precision() {
        return Err(Error::NotDifferentiable);
    }
    let v = t.valuation().expect("nonzero");
    let Some(n) = integer_sqrt(v) else {
        return Ok(PadicNumber::zero(prime));
    };
    if t.digit(v)? != 1 {
        return Ok(PadicNumber::zero(prime));
    }
    let prec = output_precision(&t, precision + v) - v;
    let y = t.shift(-v).sub(&PadicNumber::one(prime, prec.max(1)))?;
    let bm1 = beta.sub(&PadicNumber::one(prime, 1))?;
    Ok(pow_one_plus(&y, &bm1, prec.max(1))?.mul(beta)?.shift(n - v))
}

/// `g_beta` for base point `a`.
pub fn kink_part(beta: PadicNumber, a: PadicNumber, precision: i64) -> Result<SharedFn> {
    check_beta(&beta)?;
    Ok(Func::new(Domain::Qp, move |x| kink_part_eval(&beta, &a, precision, x)).shared())
}

/// `F_beta = f_beta + g_beta`.
pub fn kink_function(beta: PadicNumber, a: PadicNumber, precision: i64) -> Result<SharedFn> {
    check_beta(&beta)?;
    Ok(Func::new(Domain::Qp, move |x| {
        scale_eval(&beta, precision, x)?.add(&kink_part_eval(&beta, &a, precision, x)?)
    })
    .shared())
}

/// `F_beta'` away from `a`.
pub fn kink_derivative(beta: PadicNumber, a: PadicNumber, precision: i64) -> Result<SharedFn> {
    check_beta(&beta)?;
    Ok(Func::new(Domain::Qp, move |x| {
        scale_derivative_eval(&beta, precision, x)?.add(&kink_part_derivative(&beta, &a, precision, x)?)
    })
    .shared())
}

/// `x_n = a + p^{n^2} + p^{n^2+1}`.
pub fn kink_sequence(a: &PadicNumber, steps: usize) -> Result<Vec<(u64, PadicNumber)>> {
    let prime = a.prime();
    (1..=steps as i64)
        .map(|n| {
            let s = n * n;
            let x = a
                .add(&PadicNumber::p_power(prime, s, 1))?
                .add(&PadicNumber::p_power(prime, s + 1, 1))?;
            Ok((n as u64, x))
        })
        .collect()
}

/// Derivative probe of `F_beta` at `a` along [`kink_sequence`].
pub fn kink_trace(f: &dyn PadicFunction, a: &PadicNumber, steps: usize) -> Result<WitnessTrace> {
    probe_derivative(f, a, kink_sequence(a, steps)?, steps)
}

pub fn kink_entry(cfg: &ZooConfig) -> Result<ZooEntry> {
    let prime = cfg.prime;
    let precision = cfg.precision;
    let beta = cfg.beta.clone();
    let a = cfg.a.clone();
    let function = kink_function(beta.clone(), a.clone(), precision)?;
    let derivative = kink_derivative(beta, a.clone(), precision)?;

    let wa = a.clone();
    let witness = Witness::new("square-steps", "x_n = a + p^(n^2) + p^(n^2+1)", 1, move |steps| {
        Ok(kink_sequence(&wa, steps)?.into_iter().map(|(n, x)| (n, vec![x])).collect())
    });

    let (f, a1) = (function.clone(), a.clone());
    let nondiff = Claim::new(
        "nondiff-at-a",
        "quotients at a along x_n have norm p^(n^2 - n) and diverge",
        move |ctx| {
            let steps = ctx.steps.min(8);
            let trace = kink_trace(&*f, &a1, steps)?;
            let bad = norm_mismatches(&trace, |n| {
                let n = n as i64;
                Norm::power(prime.get(), n * n - n)
            });
            let diverging = matches!(trace.verdict.kind(), "diverges") || steps < 2;
            Ok(ClaimReport::new(
                bad.is_empty() && diverging,
                format!("verdict {}, {} norm mismatches", trace.verdict.kind(), bad.len()),
                json!({"mismatched": bad, "trace": trace.to_json()}),
            ))
        },
    );
    let (f, a2) = (function.clone(), a.clone());
    let continuity = Claim::new(
        "continuity-at-a",
        "|F(x) - F(a)| <= max(p^-k, |a| |x - a|) whenever |x - a| = p^-(k^2)",
        move |ctx| {
            let fa = f.eval(&a2)?;
            let scale = a2.norm()?.max(Norm::power(prime.get(), 0));
            let mut bad = Vec::new();
            for i in 0..ctx.samples.min(1000) {
                let k = 1 + (i % 6) as i64;
                let x = a2.add(&random_point(prime, ctx.seed, i, k * k, 6))?;
                let d = f.eval(&x)?.sub(&fa)?.norm_bound();
                let bound = Norm::from_valuation(prime.get(), k).max(scale * Norm::from_valuation(prime.get(), k * k));
                if d > bound {
                    bad.push(json!({"k": k, "x": x.to_string(), "norm": d}));
                }
            }
            Ok(ClaimReport::new(bad.is_empty(), format!("{} violations", bad.len()), json!({"violations": bad})))
        },
    );
    let a3 = a.clone();
    let consistency = derivative_claim(function.clone(), derivative.clone(), move |seed, i| {
        let x = random_point(prime, seed, i, 1 - (i % 3) as i64, 6);
        if x.sub(&a3).map(|d| d.is_zero_to_precision()).unwrap_or(true) {
            PadicNumber::p_power(prime, -1, 1)
        } else {
            x
        }
    });

    Ok(ZooEntry {
        name: "kink",
        description: "f_beta plus p^n (p^-(n^2) (x - a))^beta on the balls a + p^(n^2) + p^(n^2+1) Z_p",
        function,
        derivative: Some(derivative),
        witnesses: vec![witness],
        claims: vec![nondiff, continuity, consistency],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn rational(prime: Prime, n: i64, d: i64) -> PadicNumber {
        PadicNumber::from_rational(n, d, prime, 32).unwrap()
    }

    #[test]
    fn scale_values() {
        let prime = p(5);
        let beta = rational(prime, 2, 3);
        let f = scale_function(beta.clone(), 32).unwrap();
        for n in 0..4 {
            let x = PadicNumber::p_power(prime, -n, 8);
            assert!(f.eval(&x).unwrap().agrees_with(&PadicNumber::p_power(prime, -n, 32)));
        }
        assert!(f.eval(&PadicNumber::from_integer(15, prime, 8)).unwrap().is_exact_zero());
        assert!(f.eval(&PadicNumber::bounded_zero(prime, 0)).unwrap_err().is_insufficient_precision());
        let df = scale_derivative(beta.clone(), 32).unwrap();
        let d = df.eval(&PadicNumber::p_power(prime, -3, 8)).unwrap();
        assert_eq!(d.norm().unwrap(), Norm::power(5, 3));
    }

    #[test]
    fn scale_head_with_several_digits() {
        let prime = p(3);
        // x = 2/9 + 1/3 + 1 + 3y with y = 1 + 3: head has three digits
        let x = rational(prime, 2 + 3 + 9, 9).add(&PadicNumber::from_integer(12, prime, 8)).unwrap();
        let f = scale_function(PadicNumber::from_integer(2, prime, 8), 32).unwrap();
        // f = 3^-2 (1 + 12)^2
        let want = rational(prime, 169, 9);
        assert!(f.eval(&x).unwrap().exact_eq(&want).unwrap());
    }

    #[test]
    fn product_of_two_scales() {
        let prime = p(3);
        let poly = Polynomial::new(
            2,
            vec![Monomial {
                coeff: PadicNumber::one(prime, 8),
                exponents: vec![1, 1],
            }],
        )
        .unwrap();
        let alg = ScaleAlgebra::new(prime, poly, 40).unwrap();
        let y = PadicNumber::from_integer(6, prime, 8);
        for n in 1..4 {
            let x = PadicNumber::p_power(prime, -n, 8).add(&y).unwrap();
            let got = alg.entry.function.eval(&x).unwrap();
            // p^-2n (1+y)^(h1+h2) = p^-2n 7^12
            let want = PadicNumber::from_integer(BigInt::from(7).pow(12), prime, 8).shift(-2 * n);
            assert!(got.agrees_with(&want), "n = {n}");
        }
    }

    #[test]
    fn identity_polynomial_returns_the_entry() {
        let cfg = ZooConfig::new(p(3));
        let e = scale_entry(&cfg).unwrap();
        let same = poly_combine(std::slice::from_ref(&e), &Polynomial::identity(p(3))).unwrap();
        assert_eq!(same.name, e.name);
        assert!(Arc::ptr_eq(&same.function, &e.function));
    }

    #[test]
    fn nonconstant_search() {
        let prime = p(5);
        let one = PadicNumber::one(prime, 8);
        match check_nonconstant_combination(std::slice::from_ref(&one), std::slice::from_ref(&one), 1, 32).unwrap() {
            Nonconstant::Witness(y) => assert!(y.exact_eq(&PadicNumber::p_power(prime, 1, 8)).unwrap()),
            Nonconstant::NotFound => panic!("expected a witness"),
        }
        let pp = PadicNumber::from_integer(5, prime, 8);
        assert!(matches!(
            check_nonconstant_combination(std::slice::from_ref(&one), &[pp], 1, 32).unwrap(),
            Nonconstant::Witness(_)
        ));
        assert!(check_nonconstant_combination(&[one.clone(), one.clone()], &[one.clone(), one], 1, 32).is_err());
    }

    #[test]
    fn kink_values() {
        let prime = p(2);
        let beta = rational(prime, 1, 3);
        let a = PadicNumber::from_integer(4, prime, 8);
        let g = kink_part(beta.clone(), a.clone(), 32).unwrap();
        for n in 1..4i64 {
            let x = a.add(&PadicNumber::p_power(prime, n * n, 8)).unwrap();
            assert!(g.eval(&x).unwrap().agrees_with(&PadicNumber::p_power(prime, n, 32)));
        }
        assert!(g.eval(&a.add(&PadicNumber::p_power(prime, 2, 8)).unwrap()).unwrap().is_exact_zero());
        let t = kink_trace(&*kink_function(beta, a.clone(), 32).unwrap(), &a, 5).unwrap();
        for r in &t.rows {
            let n = r.index as i64;
            assert_eq!(r.norm, Norm::power(2, n * n - n));
        }
    }

    #[test]
    fn entry_claims_pass() {
        let mut cfg = ZooConfig::new(p(3));
        cfg.beta = rational(p(3), 1, 2);
        let ctx = super::super::ClaimContext {
            steps: 10,
            samples: 30,
            ..Default::default()
        };
        for e in [scale_entry(&cfg).unwrap(), kink_entry(&cfg).unwrap()] {
            for c in &e.claims {
                let r = c.run(&ctx).unwrap();
                assert!(r.passed, "{} {}: {}", e.name, c.name, r.summary);
            }
        }
    }
}
