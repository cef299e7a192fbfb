//! Divided differences `Phi_r f` and probes that drive witness sequences.
//!
//! `Phi_0 f = f` and
//! `Phi_r f(x1, ..., x_{r+1}) = (Phi_{r-1} f(x1, x3, ...) - Phi_{r-1} f(x2, x3, ...)) / (x1 - x2)`.
//!
//! A probe evaluates a quotient along a sequence of points and records a
//! [`WitnessTrace`]; the trace's [`Verdict`] summarises the tail.

use std::fmt;
use std::sync::Arc;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{Norm, PadicNumber};

/// Where a function is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Domain {
    /// All of `Q_p`.
    Qp,
    /// The unit ball `Z_p`.
    Zp,
}

impl Domain {
    /// Domain error when `x` lies outside.
    pub fn check(self, x: &PadicNumber) -> Result<()> {
        if self == Domain::Zp && !x.is_integral() {
            return Err(Error::domain(format!("{x} is not in Z_p")));
        }
        Ok(())
    }
}

/// A function `Q_p -> Q_p` (or `Z_p -> Q_p`) with a precision modulus.
///
/// Output digits below `m` depend only on input digits below
/// `required_precision(m)`.
pub trait PadicFunction: Send + Sync {
    fn eval(&self, x: &PadicNumber) -> Result<PadicNumber>;

    fn required_precision(&self, m: i64) -> i64 {
        m
    }

    fn domain(&self) -> Domain {
        Domain::Qp
    }
}

pub type SharedFn = Arc<dyn PadicFunction>;

impl fmt::Debug for dyn PadicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PadicFunction({:?})", self.domain())
    }
}

type EvalFn = dyn Fn(&PadicNumber) -> Result<PadicNumber> + Send + Sync;
type ModulusFn = dyn Fn(i64) -> i64 + Send + Sync;

/// A [`PadicFunction`] built from closures.
#[derive(Clone)]
pub struct Func {
    eval: Arc<EvalFn>,
    modulus: Arc<ModulusFn>,
    domain: Domain,
}

impl Func {
    pub fn new(
        domain: Domain,
        eval: impl Fn(&PadicNumber) -> Result<PadicNumber> + Send + Sync + 'static,
    ) -> Self {
        Func {
            eval: Arc::new(eval),
            modulus: Arc::new(|m| m),
            domain,
        }
    }

    pub fn with_modulus(mut self, modulus: impl Fn(i64) -> i64 + Send + Sync + 'static) -> Self {
        self.modulus = Arc::new(modulus);
        self
    }

    pub fn shared(self) -> SharedFn {
        Arc::new(self)
    }
}

impl fmt::Debug for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Func").field("domain", &self.domain).finish()
    }
}

impl PadicFunction for Func {
    fn eval(&self, x: &PadicNumber) -> Result<PadicNumber> {
        self.domain.check(x)?;
        (self.eval)(x)
    }

    fn required_precision(&self, m: i64) -> i64 {
        (self.modulus)(m)
    }

    fn domain(&self) -> Domain {
        self.domain
    }
}

/// `x -> c` for a fixed value.
pub fn constant(c: PadicNumber) -> SharedFn {
    Func::new(Domain::Qp, move |x| {
        if x.prime() != c.prime() {
            return Err(Error::PrimeMismatch {
                left: x.prime().get(),
                right: c.prime().get(),
            });
        }
        Ok(c.clone())
    })
    .with_modulus(|_| i64::MIN)
    .shared()
}

/// `x -> c x`.
pub fn linear(c: PadicNumber) -> SharedFn {
    let shift = c.valuation().unwrap_or(0);
    Func::new(Domain::Qp, move |x| c.mul(x))
        .with_modulus(move |m| m - shift)
        .shared()
}

/// `x -> x^k`.
pub fn monomial(k: i64) -> SharedFn {
    Func::new(Domain::Qp, move |x| x.powi(k)).shared()
}

/// `sum_i c_i f_i`, defined on the intersection of the domains.
pub fn linear_combination(terms: Vec<(PadicNumber, SharedFn)>) -> Result<SharedFn> {
    let first = terms
        .first()
        .ok_or_else(|| Error::domain("empty linear combination"))?;
    let prime = first.0.prime();
    let domain = if terms.iter().any(|(_, f)| f.domain() == Domain::Zp) {
        Domain::Zp
    } else {
        Domain::Qp
    };
    let terms = Arc::new(terms);
    let for_modulus = Arc::clone(&terms);
    Ok(Func::new(domain, move |x| {
        let mut acc = PadicNumber::zero(prime);
        for (c, f) in terms.iter() {
            acc = acc.add(&c.mul(&f.eval(x)?)?)?;
        }
        Ok(acc)
    })
    .with_modulus(move |m| {
        for_modulus
            .iter()
            .map(|(c, f)| f.required_precision(m - c.valuation().unwrap_or(0)))
            .max()
            .unwrap_or(m)
    })
    .shared())
}

/// Fails unless `a - b` is known to be nonzero.
fn distinct(a: &PadicNumber, b: &PadicNumber) -> Result<PadicNumber> {
    let d = a.sub(b)?;
    if d.is_exact_zero() {
        return Err(Error::domain("points of a difference quotient must be distinct"));
    }
    if d.is_bounded_zero() {
        return Err(Error::precision_needed(
            d.render_precision() + 1,
            "points are equal to known precision",
        ));
    }
    Ok(d)
}

/// The divided difference `Phi_r f` at `r + 1` pairwise distinct points.
pub fn phi_r(f: &dyn PadicFunction, points: &[PadicNumber]) -> Result<PadicNumber> {
    match points.len() {
        0 => Err(Error::domain("phi_r needs at least one point")),
        1 => f.eval(&points[0]),
        n => {
            for i in 0..n {
                for j in i + 1..n {
                    distinct(&points[i], &points[j])?;
                }
            }
            phi_unchecked(f, points)
        }
    }
}

fn phi_unchecked(f: &dyn PadicFunction, points: &[PadicNumber]) -> Result<PadicNumber> {
    if points.len() == 1 {
        return f.eval(&points[0]);
    }
    let mut first = vec![points[0].clone()];
    first.extend_from_slice(&points[2..]);
    let second = &points[1..];
    let num = phi_unchecked(f, &first)?.sub(&phi_unchecked(f, second)?)?;
    num.div(&points[0].sub(&points[1])?)
}

// -------------------------------------------------------------------------
// traces
// -------------------------------------------------------------------------

/// Length of the tail window used to decide a verdict.
pub const TAIL_WINDOW: usize = 8;
/// Norms above `p^DIVERGENCE_EXPONENT` count as divergence.
pub const DIVERGENCE_EXPONENT: i64 = 64;

#[derive(Clone, Debug)]
pub struct TraceRow {
    pub index: u64,
    pub inputs: Vec<PadicNumber>,
    pub quotient: PadicNumber,
    pub norm: Norm,
}

impl Serialize for TraceRow {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TraceRow", 5)?;
        st.serialize_field("index", &self.index)?;
        let inputs: Vec<String> = self.inputs.iter().map(|x| x.to_string()).collect();
        st.serialize_field("inputs", &inputs)?;
        st.serialize_field("quotient", &self.quotient.to_string())?;
        st.serialize_field("quotient_digits", &self.quotient.digits())?;
        st.serialize_field("norm", &self.norm)?;
        st.end()
    }
}

/// Summary of a trace's tail.
#[derive(Clone, Debug)]
pub enum Verdict {
    /// The tail settles on this value (known to the precision it carries).
    ConvergesTo(PadicNumber),
    /// The norm is constant and nonzero but the values do not settle.
    StaysAt(Norm),
    /// Norms grow past the divergence threshold or increase along the tail.
    Diverges,
    Inconclusive,
}

impl Verdict {
    pub fn limit(&self) -> Option<&PadicNumber> {
        match self {
            Verdict::ConvergesTo(v) => Some(v),
            _ => None,
        }
    }

    /// Converges to a value agreeing with `v` at shared precision.
    pub fn converges_to_value(&self, v: &PadicNumber) -> bool {
        self.limit().is_some_and(|l| l.agrees_with(v))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::ConvergesTo(_) => "converges_to",
            Verdict::StaysAt(_) => "stays_at",
            Verdict::Diverges => "diverges",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Verdict", 2)?;
        st.serialize_field("kind", self.kind())?;
        match self {
            Verdict::ConvergesTo(v) => st.serialize_field("value", &v.to_string())?,
            Verdict::StaysAt(n) => st.serialize_field("value", n)?,
            _ => st.serialize_field("value", &Option::<String>::None)?,
        }
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessTrace {
    pub rows: Vec<TraceRow>,
    pub verdict: Verdict,
}

impl WitnessTrace {
    pub fn from_rows(rows: Vec<TraceRow>) -> Self {
        let verdict = classify(&rows);
        WitnessTrace { rows, verdict }
    }

    pub fn norms(&self) -> impl Iterator<Item = Norm> + '_ {
        self.rows.iter().map(|r| r.norm)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trace serializes")
    }
}

fn classify(rows: &[TraceRow]) -> Verdict {
    let t = rows.len().min(TAIL_WINDOW);
    if t < 2 {
        return Verdict::Inconclusive;
    }
    let tail = &rows[rows.len() - t..];
    let last = &tail[t - 1];

    if tail.iter().all(|r| r.quotient.agrees_with(&last.quotient)) {
        return Verdict::ConvergesTo(last.quotient.clone());
    }

    let exponents: Vec<Option<i64>> = tail.iter().map(|r| r.norm.exponent()).collect();
    let last_exp = exponents[t - 1];
    if last_exp.is_some_and(|e| e > DIVERGENCE_EXPONENT) {
        return Verdict::Diverges;
    }
    let increasing = exponents
        .windows(2)
        .all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b > a));
    if increasing {
        return Verdict::Diverges;
    }

    // Successive gaps shrinking: the tail is Cauchy, and the last value is
    // known up to the size of the last gap.
    let gaps: Vec<Option<i64>> = tail
        .windows(2)
        .map(|w| {
            w[1].quotient
                .sub(&w[0].quotient)
                .ok()
                .and_then(|d| d.valuation())
        })
        .collect();
    let shrinking = gaps
        .windows(2)
        .all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b > a));
    if gaps.len() >= 2 && shrinking {
        let last_gap = gaps[gaps.len() - 1].expect("checked above");
        return Verdict::ConvergesTo(last.quotient.reduce_precision(last_gap));
    }

    if !last.norm.is_zero() && tail.iter().all(|r| r.norm == last.norm) {
        return Verdict::StaysAt(last.norm);
    }
    Verdict::Inconclusive
}

fn row(index: u64, inputs: Vec<PadicNumber>, quotient: PadicNumber) -> Result<TraceRow> {
    let norm = quotient.norm()?;
    Ok(TraceRow {
        index,
        inputs,
        quotient,
        norm,
    })
}

/// Trace of `Phi_1 f(x_n, a)` along `x_n -> a`.
///
/// Fails if some `x_n` equals `a` or `|x_n - a|` does not strictly decrease.
pub fn probe_derivative<I>(
    f: &dyn PadicFunction,
    a: &PadicNumber,
    seq: I,
    steps: usize,
) -> Result<WitnessTrace>
where
    I: IntoIterator<Item = (u64, PadicNumber)>,
{
    let fa = f.eval(a)?;
    let mut rows = Vec::with_capacity(steps);
    let mut prev: Option<i64> = None;
    for (n, x) in seq.into_iter().take(steps) {
        let h = distinct(&x, a)?;
        let v = h.valuation().expect("distinct points have a valuation");
        if prev.is_some_and(|p| v <= p) {
            return Err(Error::domain("probe sequence does not approach the base point"));
        }
        prev = Some(v);
        let q = f.eval(&x)?.sub(&fa)?.div(&h)?;
        rows.push(row(n, vec![x], q)?);
    }
    Ok(WitnessTrace::from_rows(rows))
}

/// Trace of `Phi_1 f(x_n, y_n)` along pairs.
pub fn probe_strict<I>(f: &dyn PadicFunction, pairs: I, steps: usize) -> Result<WitnessTrace>
where
    I: IntoIterator<Item = (u64, (PadicNumber, PadicNumber))>,
{
    let mut rows = Vec::with_capacity(steps);
    for (n, (x, y)) in pairs.into_iter().take(steps) {
        let q = phi_r(f, &[x.clone(), y.clone()])?;
        rows.push(row(n, vec![x, y], q)?);
    }
    Ok(WitnessTrace::from_rows(rows))
}

/// Trace of `Phi_2 f(x_n, y_n, z_n)` along triples.
pub fn probe_strict_order2<I>(f: &dyn PadicFunction, triples: I, steps: usize) -> Result<WitnessTrace>
where
    I: IntoIterator<Item = (u64, (PadicNumber, PadicNumber, PadicNumber))>,
{
    let mut rows = Vec::with_capacity(steps);
    for (n, (x, y, z)) in triples.into_iter().take(steps) {
        let pts = vec![x, y, z];
        let q = phi_r(f, &pts)?;
        rows.push(row(n, pts, q)?);
    }
    Ok(WitnessTrace::from_rows(rows))
}

/// `|Phi_1 f(x, x + h) - f'(x)|` for each step `h`.
pub fn derivative_deviations(
    f: &dyn PadicFunction,
    df: &dyn PadicFunction,
    x: &PadicNumber,
    steps: &[PadicNumber],
) -> Result<Vec<(Norm, Norm)>> {
    let d = df.eval(x)?;
    steps
        .iter()
        .map(|h| {
            let q = phi_r(f, &[x.add(h)?, x.clone()])?;
            Ok((h.norm()?, q.sub(&d)?.norm_bound()))
        })
        .collect()
}
