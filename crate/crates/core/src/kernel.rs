//! Numeric scaffolding shared by every transformation: the scalar trait,
//! sample/estimate types, the HUGE/TINY division guard and the streaming
//! contract that turns a stream of partial sums into estimates.

use std::collections::VecDeque;
use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};
use thiserror::Error;

/// Scalar type a transformation runs in.
pub trait Real: Float + FloatConst + Debug + Display + Send + Sync + 'static {
    /// Significant digits used when printing tables in this precision.
    const TABLE_DIGITS: usize;
    /// Short name used in reports.
    const NAME: &'static str;

    fn lit(x: f64) -> Self;

    fn approx(self) -> f64;

    fn default_policy() -> SafeguardPolicy<Self>;

    fn of(n: usize) -> Self {
        Self::lit(n as f64)
    }
}

impl Real for f64 {
    const TABLE_DIGITS: usize = 13;
    const NAME: &'static str = "binary64";

    fn lit(x: f64) -> Self {
        x
    }

    fn approx(self) -> f64 {
        self
    }

    fn default_policy() -> SafeguardPolicy<Self> {
        SafeguardPolicy { tiny: 1e-300, huge: 1e300 }
    }
}

/// IEEE binary128 scalar backing the optional extended-precision mode.
#[cfg(feature = "binary128")]
pub type Quad = f128::f128;

#[cfg(feature = "binary128")]
impl Real for Quad {
    const TABLE_DIGITS: usize = 14;
    const NAME: &'static str = "binary128";

    fn lit(x: f64) -> Self {
        f128::f128::from(x)
    }

    fn approx(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn default_policy() -> SafeguardPolicy<Self> {
        SafeguardPolicy { tiny: Self::lit(1e-300), huge: Self::lit(1e300) }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("expected sequence index {expected}, got {got}")]
    OutOfOrder { expected: usize, got: usize },
    #[error("point {n} has no interpolation point x")]
    MissingX { n: usize },
    #[error("point {n} has no remainder estimate omega")]
    MissingOmega { n: usize },
    #[error("remainder estimate '{rule}' is zero at n = {n}")]
    ZeroOmega { rule: String, n: usize },
    #[error("interpolation point x_{n} coincides with an earlier point")]
    CoincidentPoints { n: usize },
    #[error("interpolation points must increase strictly (violated at n = {n})")]
    NonMonotone { n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("need at least {need} values, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("no result: {0}")]
    NoResult(String),
}

/// One input sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequencePoint<R> {
    pub n: usize,
    pub s: R,
    pub x: Option<R>,
    pub omega: Option<R>,
}

impl<R: Real> SequencePoint<R> {
    pub fn new(n: usize, s: R) -> Self {
        SequencePoint { n, s, x: None, omega: None }
    }

    pub fn with_x(mut self, x: R) -> Self {
        self.x = Some(x);
        self
    }

    pub fn with_omega(mut self, omega: R) -> Self {
        self.omega = Some(omega);
        self
    }

    pub fn require_x(&self) -> Result<R, Error> {
        self.x.ok_or(Error::MissingX { n: self.n })
    }

    pub fn require_omega(&self) -> Result<R, Error> {
        self.omega.ok_or(Error::MissingOmega { n: self.n })
    }
}

/// Current best approximation to the (anti)limit. `n` is the table
/// superscript, `k` the subscript of the entry that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<R> {
    pub value: R,
    pub n: usize,
    pub k: usize,
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafeguardPolicy<R> {
    pub tiny: R,
    pub huge: R,
}

impl<R: Real> Default for SafeguardPolicy<R> {
    fn default() -> Self {
        R::default_policy()
    }
}

impl<R: Real> SafeguardPolicy<R> {
    pub fn new(tiny: R, huge: R) -> Result<Self, Error> {
        let one = R::one();
        if !(tiny > R::zero() && tiny < one && huge > one && huge.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "safeguard needs 0 < tiny < 1 < huge, got tiny={tiny}, huge={huge}"
            )));
        }
        Ok(SafeguardPolicy { tiny, huge })
    }
}

/// Division with the HUGE/TINY safeguard. Returns the quotient and whether
/// the guard fired. The result is always finite.
pub fn guard_divide<R: Real>(num: R, den: R, policy: &SafeguardPolicy<R>) -> (R, bool) {
    let saturated = |neg: bool| if neg { -policy.huge } else { policy.huge };
    if !(den.abs() >= policy.tiny) {
        let neg = num.is_sign_negative() != den.is_sign_negative() && !den.is_nan();
        return (saturated(neg && num != R::zero()), true);
    }
    let q = num / den;
    if q.is_finite() {
        if q.abs() > policy.huge {
            return (saturated(q < R::zero()), true);
        }
        (q, false)
    } else {
        let neg = q.is_sign_negative() && !q.is_nan();
        (saturated(neg), true)
    }
}

/// Pochhammer symbol (z)_m = z (z+1) ... (z+m-1); 1 for m = 0.
pub fn pochhammer<R: Real>(z: R, m: usize) -> R {
    (0..m).fold(R::one(), |acc, j| acc * (z + R::of(j)))
}

/// k-th forward difference at the first entry, from the binomial sum.
/// Meant for checking recursions, not for use inside them.
pub fn forward_difference<R: Real>(values: &[R], k: usize) -> Result<R, Error> {
    if values.len() < k + 1 {
        return Err(Error::TooShort { need: k + 1, got: values.len() });
    }
    let mut binom = R::one();
    let mut sum = R::zero();
    for (j, &f) in values.iter().take(k + 1).enumerate() {
        let term = binom * f;
        sum = if (k - j).is_multiple_of(2) { sum + term } else { sum - term };
        binom = binom * R::of(k - j) / R::of(j + 1);
    }
    Ok(sum)
}

/// (T - s) / (s_n - s): how much an estimate improves on the first element
/// of the string it was computed from.
pub fn acceleration_ratio<R: Real>(estimate: R, first: R, limit: R) -> R {
    (estimate - limit) / (first - limit)
}

/// Relative deviation |a - b| / |b| (absolute when b is zero).
pub fn rel_dev<R: Real>(a: R, b: R) -> R {
    let d = (a - b).abs();
    if b == R::zero() {
        d
    } else {
        d / b.abs()
    }
}

/// Number of leading significant decimal digits in which `a` agrees with `b`.
pub fn agreeing_digits(a: f64, b: f64) -> f64 {
    let d = rel_dev(a, b);
    if d == 0.0 {
        f64::INFINITY
    } else {
        -d.log10()
    }
}

/// Core of a transformation: consumes fully annotated points.
pub trait Extend<R: Real> {
    fn extend(&mut self, point: &SequencePoint<R>) -> Result<Estimate<R>, Error>;
    /// Number of points consumed so far.
    fn count(&self) -> usize;
}

/// Turns raw partial sums into annotated points, possibly with a lag.
pub trait Annotate<R: Real> {
    fn annotate(&mut self, n: usize, s: R) -> Result<Option<SequencePoint<R>>, Error>;
    /// Same as `annotate` with the series term a_n known exactly, so rules
    /// built from terms need not difference the partial sums.
    fn annotate_term(&mut self, n: usize, s: R, _a: R) -> Result<Option<SequencePoint<R>>, Error> {
        self.annotate(n, s)
    }
    fn lag(&self) -> usize;
}

/// Pass-through annotation for transformations that need only s_n.
#[derive(Debug, Clone, Default)]
pub struct Bare;

impl<R: Real> Annotate<R> for Bare {
    fn annotate(&mut self, n: usize, s: R) -> Result<Option<SequencePoint<R>>, Error> {
        Ok(Some(SequencePoint::new(n, s)))
    }

    fn lag(&self) -> usize {
        0
    }
}

/// Combines an x-producing and an omega-producing annotator.
#[derive(Debug, Clone)]
pub struct Both<A, B, R> {
    first: A,
    second: B,
    xs: VecDeque<SequencePoint<R>>,
    omegas: VecDeque<SequencePoint<R>>,
}

impl<A, B, R> Both<A, B, R> {
    pub fn new(first: A, second: B) -> Self {
        Both { first, second, xs: VecDeque::new(), omegas: VecDeque::new() }
    }
}

impl<R: Real, A: Annotate<R>, B: Annotate<R>> Annotate<R> for Both<A, B, R> {
    fn annotate(&mut self, n: usize, s: R) -> Result<Option<SequencePoint<R>>, Error> {
        let a = self.first.annotate(n, s)?;
        let b = self.second.annotate(n, s)?;
        self.merge(a, b)
    }

    fn annotate_term(&mut self, n: usize, s: R, t: R) -> Result<Option<SequencePoint<R>>, Error> {
        let a = self.first.annotate_term(n, s, t)?;
        let b = self.second.annotate_term(n, s, t)?;
        self.merge(a, b)
    }

    fn lag(&self) -> usize {
        self.first.lag().max(self.second.lag())
    }
}

impl<A, B, R: Real> Both<A, B, R> {
    fn merge(&mut self, a: Option<SequencePoint<R>>, b: Option<SequencePoint<R>>) -> Result<Option<SequencePoint<R>>, Error> {
        if let Some(p) = a {
            self.xs.push_back(p);
        }
        if let Some(p) = b {
            self.omegas.push_back(p);
        }
        match (self.xs.front(), self.omegas.front()) {
            (Some(_), Some(_)) => {
                let mut p = self.xs.pop_front().unwrap();
                let q = self.omegas.pop_front().unwrap();
                p.x = p.x.or(q.x);
                p.omega = q.omega.or(p.omega);
                Ok(Some(p))
            }
            _ => Ok(None),
        }
    }
}

/// Streaming interface over raw partial sums s_0, s_1, ...
pub trait Accelerator<R: Real> {
    /// Feed the next partial sum. Returns the newest estimate, or `None`
    /// while a lagged annotator is still buffering.
    fn push(&mut self, s: R) -> Result<Option<Estimate<R>>, Error>;
    /// Feed the next partial sum together with its exact term a_n.
    fn push_term(&mut self, s: R, _a: R) -> Result<Option<Estimate<R>>, Error> {
        self.push(s)
    }
    fn lag(&self) -> usize;
}

/// An annotator feeding a transformation core.
#[derive(Debug, Clone)]
pub struct Pipeline<A, S> {
    pub annotate: A,
    pub state: S,
    next: usize,
}

impl<A, S> Pipeline<A, S> {
    pub fn new(annotate: A, state: S) -> Self {
        Pipeline { annotate, state, next: 0 }
    }
}

impl<R: Real, A: Annotate<R>, S: Extend<R>> Accelerator<R> for Pipeline<A, S> {
    fn push(&mut self, s: R) -> Result<Option<Estimate<R>>, Error> {
        let n = self.next;
        self.next += 1;
        match self.annotate.annotate(n, s)? {
            Some(p) => self.state.extend(&p).map(Some),
            None => Ok(None),
        }
    }

    fn push_term(&mut self, s: R, a: R) -> Result<Option<Estimate<R>>, Error> {
        let n = self.next;
        self.next += 1;
        match self.annotate.annotate_term(n, s, a)? {
            Some(p) => self.state.extend(&p).map(Some),
            None => Ok(None),
        }
    }

    fn lag(&self) -> usize {
        self.annotate.lag()
    }
}

/// Feed a whole prefix and collect every emitted estimate.
pub fn run_all<R: Real>(acc: &mut dyn Accelerator<R>, sums: &[R]) -> Result<Vec<Estimate<R>>, Error> {
    let mut out = Vec::with_capacity(sums.len());
    for &s in sums {
        if let Some(e) = acc.push(s)? {
            out.push(e);
        }
    }
    Ok(out)
}

/// Feed series terms a_0, a_1, ... (summed here) and collect every estimate.
pub fn run_all_terms<R: Real>(acc: &mut dyn Accelerator<R>, terms: &[R]) -> Result<Vec<Estimate<R>>, Error> {
    let mut out = Vec::with_capacity(terms.len());
    let mut total = Compensated::new();
    for &a in terms {
        let s = total.add(a);
        if let Some(e) = acc.push_term(s, a)? {
            out.push(e);
        }
    }
    Ok(out)
}

/// Feed a prefix and return the last estimate.
pub fn run_last<R: Real>(acc: &mut dyn Accelerator<R>, sums: &[R]) -> Result<Estimate<R>, Error> {
    run_all(acc, sums)?
        .pop()
        .ok_or_else(|| Error::NoResult("prefix too short for this transformation".into()))
}

/// Running differences a_0 = s_0, a_n = s_n - s_{n-1} of a partial-sum stream.
#[derive(Debug, Clone)]
pub(crate) struct TermTracker<R> {
    prev: Option<R>,
}

impl<R> Default for TermTracker<R> {
    fn default() -> Self {
        TermTracker { prev: None }
    }
}

impl<R: Real> TermTracker<R> {
    pub(crate) fn record(&mut self, s: R) {
        self.prev = Some(s);
    }

    pub(crate) fn next(&mut self, s: R) -> R {
        let a = match self.prev {
            None => s,
            Some(p) => s - p,
        };
        self.prev = Some(s);
        a
    }
}

pub(crate) fn check_index(expected: usize, got: usize) -> Result<(), Error> {
    if expected != got {
        Err(Error::OutOfOrder { expected, got })
    } else {
        Ok(())
    }
}

/// Partial sums of a list of terms, accumulated with Neumaier's
/// compensated summation.
pub fn partial_sums<R: Real>(terms: &[R]) -> Vec<R> {
    let mut acc = Compensated::new();
    terms.iter().map(|&t| acc.add(t)).collect()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Compensated<R> {
    sum: R,
    carry: R,
}

impl<R: Real> Compensated<R> {
    pub(crate) fn new() -> Self {
        Compensated { sum: R::zero(), carry: R::zero() }
    }

    pub(crate) fn add(&mut self, x: R) -> R {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
        t + self.carry
    }
}
