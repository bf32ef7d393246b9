//! Series cross-check of `G(m, λ)` for integer `m >= 0`.
//!
//! With `t = 1/λ`, the ratio `I_{m-1}(2t) / I_m(2t)` satisfies the same
//! shift recurrence `r_m = mλ + 1/r_{m+1}` as `G`, so it is evaluated here
//! from the power series
//!
//! ```text
//! I_ν(2t) = Σ_k t^(2k+ν) / (k! (k+ν)!)
//! ```
//!
//! truncated after `K` terms, in exact rationals. The identity itself is
//! not taken on trust: [`cross_check`] exists to test it against the
//! convergent engine. For `m = 0` the numerator uses `ν = 1`, since
//! `I_{-1} = I_1`.
//!
//! Tail bound: for `k >= K` every term ratio is at most
//! `r = t² / ((K+1)(K+ν+1))`. When `r < 1/2` the omitted tail is below
//! twice the first omitted term.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::bounds::{CheckError, CheckReport, Claim};
use crate::cf_core::{evaluate, CfPoint, DomainError, Enclosure, EvalConfig, Mode};
use crate::rational::{int, ratio};

/// Largest truncation index [`cross_check`] will try.
pub const MAX_TERMS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesEnclosure {
    pub lo: BigRational,
    pub hi: BigRational,
    pub terms_used: usize,
}

impl SeriesEnclosure {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn to_enclosure(&self) -> Enclosure {
        Enclosure::new(self.lo.clone(), self.hi.clone(), self.terms_used, Mode::Exact)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("at least one series term is required")]
    NoTerms,
    #[error("tail ratio {ratio} >= 1/2 at truncation {terms}; more terms needed")]
    TailNotBounded { terms: usize, ratio: BigRational },
}

/// Partial sum `Σ_{k=0..=terms}` of `I_ν(2t)` plus an upper bound on the
/// omitted tail.
fn partial_sum(nu: u32, t: &BigRational, terms: usize) -> Result<(BigRational, BigRational), OracleError> {
    let t2 = t * t;
    let mut term = num_traits::pow(t.clone(), nu as usize) / factorial(nu as u64);
    let mut sum = BigRational::zero();
    for k in 0..=terms as u64 {
        sum += &term;
        term = term * &t2 / BigRational::from_integer(BigInt::from((k + 1) * (k + 1 + nu as u64)));
    }
    // `term` is now the first omitted one, index terms+1.
    let k = terms as i64;
    let r = &t2 / int((k + 1) * (k + nu as i64 + 1));
    if r >= ratio(1, 2) {
        return Err(OracleError::TailNotBounded { terms, ratio: r });
    }
    Ok((sum, term * int(2)))
}

fn factorial(n: u64) -> BigRational {
    BigRational::from_integer((1..=n).map(BigInt::from).product::<BigInt>().max(BigInt::one()))
}

/// Rigorous enclosure of `I_{m-1}(2/λ) / I_m(2/λ)` from `terms + 1`
/// series terms in numerator and denominator.
pub fn series_ratio(m: u32, lambda: &BigRational, terms: usize) -> Result<SeriesEnclosure, OracleError> {
    CfPoint::new(BigRational::from_integer(m.into()), lambda.clone())?;
    if terms < 1 {
        return Err(OracleError::NoTerms);
    }
    let t = lambda.recip();
    let top_nu = if m == 0 { 1 } else { m - 1 };
    let (num, num_tail) = partial_sum(top_nu, &t, terms)?;
    let (den, den_tail) = partial_sum(m, &t, terms)?;
    let lo = &num / (&den + &den_tail);
    let hi = (&num + &num_tail) / &den;
    Ok(SeriesEnclosure { lo, hi, terms_used: terms })
}

/// Smallest power-of-two truncation reaching width `<= tol`.
fn series_to_tol(m: u32, lambda: &BigRational, tol: &BigRational) -> Result<SeriesEnclosure, OracleError> {
    let mut terms = 8;
    loop {
        match series_ratio(m, lambda, terms) {
            Ok(s) if &s.width() <= tol => return Ok(s),
            Ok(s) if terms >= MAX_TERMS => return Ok(s),
            Err(e @ OracleError::TailNotBounded { .. }) if terms >= MAX_TERMS => return Err(e),
            Ok(_) | Err(OracleError::TailNotBounded { .. }) => terms *= 2,
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrossCheckError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Intersects the convergent enclosure with the series enclosure, each of
/// width `<= tol`. Disjoint enclosures are a [`CheckError::Violation`].
pub fn cross_check(
    m: u32,
    lambda: &BigRational,
    tol: &BigRational,
    config: &EvalConfig,
) -> Result<CheckReport, CrossCheckError> {
    let point = CfPoint::new(BigRational::from_integer(m.into()), lambda.clone()).map_err(CheckError::from)?;
    if !tol.is_positive() {
        return Err(CheckError::Eval(crate::cf_core::CfError::NonPositiveTolerance).into());
    }
    let left = evaluate(&point, tol, config).map_err(CheckError::from)?;
    let right = series_to_tol(m, lambda, tol)?.to_enclosure();
    let overlap = left.intersection(&right);
    let gap = overlap.as_ref().map(|(lo, hi)| hi - lo).unwrap_or_else(BigRational::zero);
    let report = CheckReport {
        point,
        claim: Claim::OracleAgreement,
        certified: overlap.is_some(),
        left,
        right,
        gap,
        tol: tol.clone(),
    };
    if report.certified {
        Ok(report)
    } else {
        Err(CheckError::Violation(vec![report]).into())
    }
}
