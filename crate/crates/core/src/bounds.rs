//! The middle bound `B(m, λ) = mλ/2 + sqrt(m²λ²/4 + 1)` and certificates for
//! the inequalities and identities relating it to `G`.
//!
//! A strict inequality `a > b` is certified only when the enclosures are
//! disjoint, `A.lo > B.hi`. Overlap is reported as inconclusive, never as
//! the claim being false. Identities that fail to intersect are reported as
//! violations since they can only come from an arithmetic bug.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cf_core::{evaluate, CfError, CfPoint, DomainError, Enclosure, EvalConfig, Mode};
use crate::rational::{int, midpoint};

/// Rational enclosure of `B(m, λ)`, the positive root of `y² - mλ y - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundValue {
    pub lo: BigRational,
    pub hi: BigRational,
    pub iterations: usize,
}

impl BoundValue {
    pub fn enclosure(&self) -> Enclosure {
        Enclosure::new(self.lo.clone(), self.hi.clone(), self.iterations, Mode::Exact)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

/// `y² - a y - 1`.
pub fn bound_quadratic(a: &BigRational, y: &BigRational) -> BigRational {
    y * y - a * y - BigRational::one()
}

/// Exact bisection on `y² - mλ y - 1` down to width `<= tol`.
///
/// The bracket starts at `[0, |mλ| + 1]`, where the quadratic is `-1` and
/// non-negative respectively. An exact root on a bisection point (or at the
/// right end, as for `m = 0`) collapses the enclosure to that point.
pub fn theorem_bound(point: &CfPoint, tol: &BigRational) -> BoundValue {
    assert!(tol.is_positive(), "tolerance must be positive");
    let a = point.lead();
    let mut lo = BigRational::zero();
    let mut hi = a.abs() + BigRational::one();
    let mut iterations = 0;
    if bound_quadratic(&a, &hi).is_zero() {
        return BoundValue { lo: hi.clone(), hi, iterations };
    }
    while &(&hi - &lo) > tol {
        iterations += 1;
        let mid = midpoint(&lo, &hi);
        let f = bound_quadratic(&a, &mid);
        if f.is_zero() {
            return BoundValue { lo: mid.clone(), hi: mid, iterations };
        } else if f.is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    BoundValue { lo, hi, iterations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Claim {
    /// `G(m+1, λ) > B(m, λ)`
    SandwichUpper,
    /// `B(m, λ) > G(m, λ)`
    SandwichLower,
    /// `G(m, λ) = mλ + 1/G(m+1, λ)`
    FunctionalEquation,
    /// `G(m, λ) > 1` for `m >= 1`
    AboveOne,
    /// `G(0, λ) G(1, λ) = 1` and `G(0, λ) < 1`
    Reciprocal,
    /// Convergent engine and series oracle agree
    OracleAgreement,
}

impl Claim {
    pub fn id(self) -> &'static str {
        match self {
            Claim::SandwichUpper => "sandwich-upper",
            Claim::SandwichLower => "sandwich-lower",
            Claim::FunctionalEquation => "functional",
            Claim::AboveOne => "above-one",
            Claim::Reciprocal => "reciprocal",
            Claim::OracleAgreement => "oracle",
        }
    }

    pub fn from_id(id: &str) -> Option<Claim> {
        [
            Claim::SandwichUpper,
            Claim::SandwichLower,
            Claim::FunctionalEquation,
            Claim::AboveOne,
            Claim::Reciprocal,
            Claim::OracleAgreement,
        ]
        .into_iter()
        .find(|c| c.id() == id)
    }

    /// Strict inequalities stored as `left > right`.
    pub fn is_inequality(self) -> bool {
        matches!(self, Claim::SandwichUpper | Claim::SandwichLower | Claim::AboveOne)
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Outcome of one claim at one point.
///
/// Inequality claims read `left > right` and `gap = left.lo - right.hi`.
/// For identity claims `gap` is the length of the overlap of the two
/// enclosures. For [`Claim::Reciprocal`], `left = G(0, λ)`,
/// `right = G(1, λ)` and `gap = 1 - left.hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub point: CfPoint,
    pub claim: Claim,
    pub certified: bool,
    pub left: Enclosure,
    pub right: Enclosure,
    pub gap: BigRational,
    /// Evaluation tolerance the verdict was reached at.
    pub tol: BigRational,
}

impl CheckReport {
    fn inequality(point: &CfPoint, claim: Claim, left: Enclosure, right: Enclosure, tol: &BigRational) -> Self {
        let gap = &left.lo - &right.hi;
        Self { point: point.clone(), claim, certified: gap.is_positive(), left, right, gap, tol: tol.clone() }
    }

    /// Product interval `left * right`, meaningful for positive enclosures.
    pub fn product(&self) -> (BigRational, BigRational) {
        (&self.left.lo * &self.right.lo, &self.left.hi * &self.right.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("claim {claim} requires {requirement}")]
    Precondition { claim: Claim, requirement: &'static str },
    #[error(transparent)]
    Eval(#[from] CfError),
    #[error("inconclusive: enclosures overlap down to tolerance {}", .0.last().map(|r| r.tol.to_string()).unwrap_or_default())]
    Inconclusive(Vec<CheckReport>),
    #[error("identity violated; arithmetic bug")]
    Violation(Vec<CheckReport>),
}

impl CheckError {
    pub fn reports(&self) -> &[CheckReport] {
        match self {
            CheckError::Inconclusive(r) | CheckError::Violation(r) => r,
            _ => &[],
        }
    }
}

/// Tolerances tried in order: `tol`, `tol/1000`, ... down to `floor`.
pub(crate) fn tightening_schedule(tol: &BigRational, floor: &BigRational) -> Vec<BigRational> {
    let mut out = vec![tol.clone()];
    let step = int(1000);
    let mut t = tol.clone();
    while &t > floor {
        t = &t / &step;
        if &t < floor {
            t = floor.clone();
        }
        out.push(t.clone());
    }
    out
}

/// Runs `attempt` along the tightening schedule until it certifies.
///
/// Evaluation failures at the first tolerance are returned as errors; at
/// tighter tolerances they end the search with the last reports.
fn certify<F>(tol: &BigRational, config: &EvalConfig, mut attempt: F) -> Result<Vec<CheckReport>, CheckError>
where
    F: FnMut(&BigRational) -> Result<Vec<CheckReport>, CheckError>,
{
    let mut last: Option<Vec<CheckReport>> = None;
    for t in tightening_schedule(tol, &config.tol_floor) {
        match attempt(&t) {
            Ok(reports) if reports.iter().all(|r| r.certified) => return Ok(reports),
            Ok(reports) => last = Some(reports),
            Err(CheckError::Eval(_)) if last.is_some() => break,
            Err(e) => return Err(e),
        }
    }
    Err(CheckError::Inconclusive(last.unwrap_or_default()))
}

fn require_tol(tol: &BigRational) -> Result<(), CheckError> {
    if tol.is_positive() {
        Ok(())
    } else {
        Err(CfError::NonPositiveTolerance.into())
    }
}

/// Certifies `G(m+1, λ) > B(m, λ)` and `B(m, λ) > G(m, λ)` for `m >= 0`.
pub fn check_sandwich(
    point: &CfPoint,
    tol: &BigRational,
    config: &EvalConfig,
) -> Result<(CheckReport, CheckReport), CheckError> {
    require_tol(tol)?;
    if point.m().is_negative() {
        return Err(CheckError::Precondition { claim: Claim::SandwichUpper, requirement: "m >= 0" });
    }
    let reports = certify(tol, config, |t| {
        let upper_g = evaluate(&point.shifted(), t, config)?;
        let g = evaluate(point, t, config)?;
        let b = theorem_bound(point, t).enclosure();
        Ok(vec![
            CheckReport::inequality(point, Claim::SandwichUpper, upper_g, b.clone(), t),
            CheckReport::inequality(point, Claim::SandwichLower, b, g, t),
        ])
    })?;
    let mut it = reports.into_iter();
    match (it.next(), it.next()) {
        (Some(upper), Some(lower)) => Ok((upper, lower)),
        _ => unreachable!("sandwich produces two reports"),
    }
}

/// Checks that `G(m, λ)` and `mλ + 1/G(m+1, λ)`, evaluated independently,
/// intersect with overlap at most `2 tol`.
pub fn check_functional_equation(
    point: &CfPoint,
    tol: &BigRational,
    config: &EvalConfig,
) -> Result<CheckReport, CheckError> {
    require_tol(tol)?;
    let left = evaluate(point, tol, config)?;
    let tail = evaluate(&point.shifted(), tol, config)?;
    let right = Enclosure::shift_reciprocal(&point.lead(), &tail);
    let overlap = left.intersection(&right);
    let gap = overlap.as_ref().map(|(lo, hi)| hi - lo).unwrap_or_else(BigRational::zero);
    let certified = overlap.is_some() && gap <= tol * int(2);
    let report = CheckReport {
        point: point.clone(),
        claim: Claim::FunctionalEquation,
        certified,
        left,
        right,
        gap,
        tol: tol.clone(),
    };
    if overlap.is_none() {
        return Err(CheckError::Violation(vec![report]));
    }
    Ok(report)
}

/// Certifies `G(m, λ) > 1` for `m >= 1`.
pub fn check_g_above_one(point: &CfPoint, tol: &BigRational, config: &EvalConfig) -> Result<CheckReport, CheckError> {
    require_tol(tol)?;
    if point.m() < &BigRational::one() {
        return Err(CheckError::Precondition { claim: Claim::AboveOne, requirement: "m >= 1" });
    }
    let mut reports = certify(tol, config, |t| {
        let g = evaluate(point, t, config)?;
        Ok(vec![CheckReport::inequality(point, Claim::AboveOne, g, Enclosure::point(BigRational::one()), t)])
    })?;
    Ok(reports.remove(0))
}

/// Certifies `1 ∈ G(0, λ) · G(1, λ)` and `G(0, λ) < 1`.
pub fn check_reciprocal(
    lambda: &BigRational,
    tol: &BigRational,
    config: &EvalConfig,
) -> Result<CheckReport, CheckError> {
    require_tol(tol)?;
    let zero = CfPoint::new(BigRational::zero(), lambda.clone())?;
    let one = BigRational::one();
    let mut reports = certify(tol, config, |t| {
        let g0 = evaluate(&zero, t, config)?;
        let g1 = evaluate(&zero.shifted(), t, config)?;
        let gap = &one - &g0.hi;
        let mut report = CheckReport {
            point: zero.clone(),
            claim: Claim::Reciprocal,
            certified: false,
            left: g0,
            right: g1,
            gap,
            tol: t.clone(),
        };
        let (plo, phi) = report.product();
        let contains_one = plo <= one && one <= phi;
        if !contains_one {
            return Err(CheckError::Violation(vec![report]));
        }
        report.certified = report.gap.is_positive();
        Ok(vec![report])
    })?;
    Ok(reports.remove(0))
}
