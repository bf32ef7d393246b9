//! Convergents of `<x_0, x_1, x_2, ...>` with `x_j = (m + j)λ` and certified
//! brackets of their limit `G(m, λ)`.
//!
//! For positive partial quotients `x_1, x_2, ...` even convergents increase,
//! odd convergents decrease and every even convergent lies below every odd
//! one, so two consecutive convergents bracket the limit. Evaluation of
//! `G(m, λ)` always goes through the tail `G(m+1, λ)`, whose terms
//! `(m+1+j)λ` are all positive whenever `m > -1`, and is then shifted by
//! `x_0 = mλ`, which may be zero or negative.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::{Dyadic, Round};
use crate::rational::{int, ratio};

/// Below this `λ` [`evaluate`] switches to directed-rounding mode.
pub fn directed_lambda_threshold() -> BigRational {
    ratio(1, 64)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("m must be greater than -1 (got {0})")]
    MTooSmall(BigRational),
    #[error("lambda must be positive (got {0})")]
    NonPositiveLambda(BigRational),
}

/// Parameter pair `(m, λ)` with `m > -1` and `λ > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CfPoint {
    m: BigRational,
    lambda: BigRational,
}

impl CfPoint {
    pub fn new(m: BigRational, lambda: BigRational) -> Result<Self, DomainError> {
        if m <= -BigRational::one() {
            return Err(DomainError::MTooSmall(m));
        }
        if !lambda.is_positive() {
            return Err(DomainError::NonPositiveLambda(lambda));
        }
        Ok(Self { m, lambda })
    }

    pub fn m(&self) -> &BigRational {
        &self.m
    }

    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }

    /// `x_0 = mλ`.
    pub fn lead(&self) -> BigRational {
        &self.m * &self.lambda
    }

    /// The point `(m + 1, λ)`, whose fraction is the tail after `x_0`.
    pub fn shifted(&self) -> CfPoint {
        CfPoint { m: &self.m + BigRational::one(), lambda: self.lambda.clone() }
    }
}

impl fmt::Display for CfPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m={}, λ={})", self.m, self.lambda)
    }
}

/// Partial quotient `x_j = (m + j)λ`.
pub fn term(point: &CfPoint, j: u64) -> BigRational {
    (&point.m + BigRational::from_integer(BigInt::from(j))) * &point.lambda
}

/// State of the recurrence `P_n = x_n P_{n-1} + P_{n-2}` (and likewise `Q_n`).
///
/// `n` is the index of the newest pair; the seed has `n = -1` with
/// `P_{-1} = 1, Q_{-1} = 0` and `P_{-2} = 0, Q_{-2} = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentPair {
    pub p: BigRational,
    pub q: BigRational,
    pub p_prev: BigRational,
    pub q_prev: BigRational,
    pub n: i64,
}

impl ConvergentPair {
    pub fn seed() -> Self {
        Self {
            p: BigRational::one(),
            q: BigRational::zero(),
            p_prev: BigRational::zero(),
            q_prev: BigRational::one(),
            n: -1,
        }
    }

    /// `G_n = P_n / Q_n`, or `None` while `Q_n = 0` (only for the seed).
    pub fn value(&self) -> Option<BigRational> {
        if self.q.is_zero() {
            None
        } else {
            Some(&self.p / &self.q)
        }
    }

    /// `P_n Q_{n-1} - P_{n-1} Q_n`, which equals `(-1)^(n+1)`.
    pub fn determinant(&self) -> BigRational {
        &self.p * &self.q_prev - &self.p_prev * &self.q
    }

    fn advance_in_place(&mut self, x: &BigRational) {
        let p = x * &self.p + &self.p_prev;
        let q = x * &self.q + &self.q_prev;
        self.p_prev = std::mem::replace(&mut self.p, p);
        self.q_prev = std::mem::replace(&mut self.q, q);
        self.n += 1;
    }
}

/// One step of the convergent recurrence with partial quotient `x`.
pub fn advance(state: &ConvergentPair, x: &BigRational) -> ConvergentPair {
    let mut next = state.clone();
    next.advance_in_place(x);
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Directed,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Directed => "directed",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Closed interval `[lo, hi]` certified to contain a real quantity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
    /// Index of the deepest convergent (or series term) used.
    pub depth: usize,
    pub mode: Mode,
}

impl Enclosure {
    pub fn new(lo: BigRational, hi: BigRational, depth: usize, mode: Mode) -> Self {
        debug_assert!(lo <= hi, "inverted enclosure");
        Self { lo, hi, depth, mode }
    }

    /// Degenerate enclosure of an exactly known value.
    pub fn point(value: BigRational) -> Self {
        Self { lo: value.clone(), hi: value, depth: 0, mode: Mode::Exact }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Overlap `[max lo, min hi]`, if any.
    pub fn intersection(&self, other: &Enclosure) -> Option<(BigRational, BigRational)> {
        let lo = crate::rational::max_ref(&self.lo, &other.lo);
        let hi = crate::rational::min_ref(&self.hi, &other.hi);
        (lo <= hi).then(|| (lo.clone(), hi.clone()))
    }

    pub fn is_subset_of(&self, other: &Enclosure) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self` strictly above `other`: `self.lo > other.hi`.
    pub fn certainly_above(&self, other: &Enclosure) -> bool {
        self.lo > other.hi
    }

    /// Exact image `a + 1/T` of a positive enclosure `T`.
    pub fn shift_reciprocal(a: &BigRational, tail: &Enclosure) -> Enclosure {
        assert!(tail.lo.is_positive(), "tail enclosure must be positive");
        Enclosure { lo: a + tail.hi.recip(), hi: a + tail.lo.recip(), depth: tail.depth + 1, mode: tail.mode }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::rational::Approx;
        write!(f, "[{}, {}] ({} depth {})", Approx(&self.lo), Approx(&self.hi), self.mode, self.depth)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("depth must be at least 1 (got {0})")]
    DepthTooSmall(usize),
    #[error("bracketing needs x_0 >= 0, i.e. m >= 0 (got m = {0})")]
    NegativeLead(BigRational),
    #[error("tolerance must be positive")]
    NonPositiveTolerance,
    #[error("precision must be at least 64 bits (got {0})")]
    PrecisionTooLow(u32),
    #[error("tolerance not reached within depth budget {max_depth}; best enclosure {best}")]
    BudgetExceeded { best: Box<Enclosure>, max_depth: usize },
    #[error("directed evaluation did not converge within depth {max_depth}; best enclosure {best}")]
    NotConverged { best: Box<Enclosure>, max_depth: usize },
}

impl CfError {
    /// Best rigorous enclosure carried by budget failures.
    pub fn best(&self) -> Option<&Enclosure> {
        match self {
            CfError::BudgetExceeded { best, .. } | CfError::NotConverged { best, .. } => Some(best),
            _ => None,
        }
    }
}

/// Evaluation limits shared by every certified computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalConfig {
    pub max_depth: usize,
    pub precision_bits: u32,
    /// Smallest tolerance adaptive tightening will try before giving up.
    pub tol_floor: BigRational,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { max_depth: 10_000, precision_bits: 128, tol_floor: crate::rational::pow10(-30) }
    }
}

fn bracket(a: &BigRational, b: &BigRational, depth: usize, mode: Mode) -> Enclosure {
    if a <= b {
        Enclosure::new(a.clone(), b.clone(), depth, mode)
    } else {
        Enclosure::new(b.clone(), a.clone(), depth, mode)
    }
}

/// Bracket `[G_2k, G_2k+1]` of `point`'s own convergents `G_0..=G_depth`:
/// the last two of them, ordered.
///
/// Requires `m >= 0` so that `x_0 >= 0` and all later terms are positive.
pub fn tail_enclosure(point: &CfPoint, depth: usize) -> Result<Enclosure, CfError> {
    if depth < 1 {
        return Err(CfError::DepthTooSmall(depth));
    }
    if point.m.is_negative() {
        return Err(CfError::NegativeLead(point.m.clone()));
    }
    let mut state = ConvergentPair::seed();
    for j in 0..=depth as u64 {
        state.advance_in_place(&term(point, j));
    }
    let last = &state.p / &state.q;
    let prev = &state.p_prev / &state.q_prev;
    Ok(bracket(&prev, &last, depth, Mode::Exact))
}

fn check_tol(tol: &BigRational) -> Result<(), CfError> {
    if tol.is_positive() {
        Ok(())
    } else {
        Err(CfError::NonPositiveTolerance)
    }
}

/// Exact-rational enclosure of `G(m, λ)` of width `<= tol`.
///
/// Convergents of the tail `G(m+1, λ)` are advanced one at a time; each
/// consecutive pair `T` gives the candidate `[mλ + 1/T.hi, mλ + 1/T.lo]`.
pub fn eval_enclosure(point: &CfPoint, tol: &BigRational, max_depth: usize) -> Result<Enclosure, CfError> {
    check_tol(tol)?;
    let tail = point.shifted();
    let lead = point.lead();
    let mut state = ConvergentPair::seed();
    state.advance_in_place(&term(&tail, 0));
    let mut prev = &state.p / &state.q;
    let mut depth = 0usize;
    loop {
        depth += 1;
        state.advance_in_place(&term(&tail, depth as u64));
        let cur = &state.p / &state.q;
        let t = bracket(&prev, &cur, depth, Mode::Exact);
        let g = Enclosure::shift_reciprocal(&lead, &t);
        if &g.width() <= tol {
            return Ok(g);
        }
        if depth >= max_depth {
            return Err(CfError::BudgetExceeded { best: Box::new(g), max_depth });
        }
        prev = cur;
    }
}

/// Directed enclosure of the tail `<y_0, ..., y_n, ...>` truncated at `n`,
/// evaluated backward. The true tail value `t_n` satisfies
/// `y_n < t_n < y_n + 1/y_{n+1}`, and `t_k = y_k + 1/t_{k+1}` is decreasing
/// in `t_{k+1}`, so ends swap at every step.
fn directed_tail(tail: &CfPoint, n: usize, prec: u64) -> (Dyadic, Dyadic) {
    let y = |j: usize, r: Round| Dyadic::from_rational(&term(tail, j as u64), prec, r);
    let mut lo = y(n, Round::Down);
    let mut hi = y(n, Round::Up).add(&y(n + 1, Round::Down).recip(prec, Round::Up), prec, Round::Up);
    for k in (0..n).rev() {
        let new_lo = y(k, Round::Down).add(&hi.recip(prec, Round::Down), prec, Round::Down);
        let new_hi = y(k, Round::Up).add(&lo.recip(prec, Round::Up), prec, Round::Up);
        lo = new_lo;
        hi = new_hi;
    }
    (lo, hi)
}

fn directed_at_depth(point: &CfPoint, n: usize, prec: u64) -> Enclosure {
    let (t_lo, t_hi) = directed_tail(&point.shifted(), n, prec);
    let lead = point.lead();
    let lo = Dyadic::from_rational(&lead, prec, Round::Down).add(&t_hi.recip(prec, Round::Down), prec, Round::Down);
    let hi = Dyadic::from_rational(&lead, prec, Round::Up).add(&t_lo.recip(prec, Round::Up), prec, Round::Up);
    Enclosure::new(lo.to_rational(), hi.to_rational(), n + 1, Mode::Directed)
}

/// Bits needed so that rounding noise stays well below `tol`.
fn working_precision(tol: &BigRational, precision_bits: u32) -> u64 {
    let tol_bits = (tol.denom().bits() as i64 - tol.numer().bits() as i64).max(0) as u64;
    (precision_bits as u64).max(tol_bits + 64)
}

/// Enclosure of `G(m, λ)` in outward-rounded fixed-precision arithmetic.
///
/// Truncation depth doubles from 16 up to `max_depth`. When the width is
/// still above `tol` the best (deepest) enclosure is returned inside
/// [`CfError::NotConverged`]; it is rigorous either way.
pub fn eval_directed(
    point: &CfPoint,
    tol: &BigRational,
    precision_bits: u32,
    max_depth: usize,
) -> Result<Enclosure, CfError> {
    check_tol(tol)?;
    if precision_bits < 64 {
        return Err(CfError::PrecisionTooLow(precision_bits));
    }
    let prec = working_precision(tol, precision_bits);
    let max_n = max_depth.max(1);
    let mut n = 16.min(max_n);
    loop {
        let enc = directed_at_depth(point, n, prec);
        if &enc.width() <= tol {
            return Ok(enc);
        }
        if n >= max_n {
            return Err(CfError::NotConverged { best: Box::new(enc), max_depth });
        }
        n = (n * 2).min(max_n);
    }
}

/// Mode-selecting evaluation: exact for `λ >= 1/64`, directed below.
pub fn evaluate(point: &CfPoint, tol: &BigRational, config: &EvalConfig) -> Result<Enclosure, CfError> {
    if point.lambda() < &directed_lambda_threshold() {
        eval_directed(point, tol, config.precision_bits, config.max_depth)
    } else {
        eval_enclosure(point, tol, config.max_depth)
    }
}
