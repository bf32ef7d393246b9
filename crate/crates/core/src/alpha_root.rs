//! Bisection in `m` for `α(λ) ∈ (0, 1)` with `G(α(λ), λ) = 1`.
//!
//! The start bracket is `[0, 1]`: `G(0, λ) < 1 < G(1, λ)` is certified
//! first. An endpoint moves only on a certified comparison with 1; a
//! midpoint whose enclosure straddles 1 is re-evaluated at a tolerance ten
//! times smaller, at most [`MAX_TIGHTENINGS`] times. Continuity of `G` in
//! `m` is assumed. No uniqueness claim is made about the root.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::cf_core::{evaluate, CfError, CfPoint, DomainError, Enclosure, EvalConfig};
use crate::rational::{int, midpoint};

pub const MAX_TIGHTENINGS: usize = 8;
pub const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaResult {
    pub lambda: BigRational,
    pub m_lo: BigRational,
    pub m_hi: BigRational,
    /// `G` at the midpoint of the final bracket, and the tolerance it was
    /// finally evaluated at.
    pub g_at_mid: Enclosure,
    pub mid_tol: BigRational,
    /// Certificates `G(m_lo, λ).hi < 1` and `G(m_hi, λ).lo > 1`.
    pub g_lo: Enclosure,
    pub g_hi: Enclosure,
    pub iterations: usize,
}

impl AlphaResult {
    pub fn width(&self) -> BigRational {
        &self.m_hi - &self.m_lo
    }

    pub fn midpoint(&self) -> BigRational {
        midpoint(&self.m_lo, &self.m_hi)
    }

    /// Re-evaluates both endpoints and checks the stored directions.
    pub fn recertify(&self, tol: &BigRational, config: &EvalConfig) -> Result<bool, CfError> {
        let one = BigRational::one();
        let lo = evaluate(&CfPoint::new(self.m_lo.clone(), self.lambda.clone())?, tol, config)?;
        let hi = evaluate(&CfPoint::new(self.m_hi.clone(), self.lambda.clone())?, tol, config)?;
        Ok(lo.hi < one && hi.lo > one)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphaError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Eval(#[from] CfError),
    #[error("could not certify G(0, λ) < 1 < G(1, λ) at λ = {0}")]
    StartNotCertified(BigRational),
    #[error("iteration budget exhausted; best bracket [{}, {}]", .0.m_lo, .0.m_hi)]
    BudgetExceeded(Box<AlphaResult>),
    #[error("midpoint {} straddles 1 after maximum tightening", .0.midpoint())]
    Inconclusive(Box<AlphaResult>),
}

impl AlphaError {
    pub fn best(&self) -> Option<&AlphaResult> {
        match self {
            AlphaError::BudgetExceeded(r) | AlphaError::Inconclusive(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Side {
    Below,
    Above,
}

/// Evaluates `G(m, λ)` and compares with 1, tightening on straddle.
fn classify(
    m: &BigRational,
    lambda: &BigRational,
    g_tol: &BigRational,
    config: &EvalConfig,
) -> Result<(Option<Side>, Enclosure, BigRational), CfError> {
    let point = CfPoint::new(m.clone(), lambda.clone())?;
    let one = BigRational::one();
    let ten = int(10);
    let mut tol = g_tol.clone();
    let mut enc = evaluate(&point, &tol, config)?;
    for attempt in 0..=MAX_TIGHTENINGS {
        if enc.hi < one {
            return Ok((Some(Side::Below), enc, tol));
        }
        if enc.lo > one {
            return Ok((Some(Side::Above), enc, tol));
        }
        if attempt == MAX_TIGHTENINGS {
            break;
        }
        tol = &tol / &ten;
        enc = evaluate(&point, &tol, config)?;
    }
    Ok((None, enc, tol))
}

fn near_one(enc: &Enclosure, g_tol: &BigRational) -> bool {
    let one = BigRational::one();
    enc.contains(&one) || ((&enc.lo - &one).abs() <= *g_tol && (&enc.hi - &one).abs() <= *g_tol)
}

/// Brackets `α(λ)` to width `<= bracket_tol`, stopping once the midpoint
/// enclosure also straddles 1 or lies within `g_tol` of it.
pub fn find_alpha(
    lambda: &BigRational,
    bracket_tol: &BigRational,
    g_tol: &BigRational,
    config: &EvalConfig,
) -> Result<AlphaResult, AlphaError> {
    if !bracket_tol.is_positive() || !g_tol.is_positive() {
        return Err(CfError::NonPositiveTolerance.into());
    }
    CfPoint::new(BigRational::zero(), lambda.clone())?;
    let mut m_lo = BigRational::zero();
    let mut m_hi = BigRational::one();
    let (side_lo, mut g_lo, _) = classify(&m_lo, lambda, g_tol, config)?;
    let (side_hi, mut g_hi, _) = classify(&m_hi, lambda, g_tol, config)?;
    if side_lo != Some(Side::Below) || side_hi != Some(Side::Above) {
        return Err(AlphaError::StartNotCertified(lambda.clone()));
    }

    let mut iterations = 0;
    loop {
        let mid = midpoint(&m_lo, &m_hi);
        let (side, g_mid, mid_tol) = classify(&mid, lambda, g_tol, config)?;
        let interior = m_lo.is_positive() && m_hi < BigRational::one();
        let done = interior && &(&m_hi - &m_lo) <= bracket_tol && near_one(&g_mid, g_tol);
        let result = |m_lo: &BigRational, m_hi: &BigRational, g_lo: &Enclosure, g_hi: &Enclosure| AlphaResult {
            lambda: lambda.clone(),
            m_lo: m_lo.clone(),
            m_hi: m_hi.clone(),
            g_at_mid: g_mid.clone(),
            mid_tol: mid_tol.clone(),
            g_lo: g_lo.clone(),
            g_hi: g_hi.clone(),
            iterations,
        };
        if done {
            return Ok(result(&m_lo, &m_hi, &g_lo, &g_hi));
        }
        if iterations >= MAX_ITERATIONS {
            return Err(AlphaError::BudgetExceeded(Box::new(result(&m_lo, &m_hi, &g_lo, &g_hi))));
        }
        match side {
            Some(Side::Below) => {
                m_lo = mid;
                g_lo = g_mid;
            }
            Some(Side::Above) => {
                m_hi = mid;
                g_hi = g_mid;
            }
            None => return Err(AlphaError::Inconclusive(Box::new(result(&m_lo, &m_hi, &g_lo, &g_hi)))),
        }
        iterations += 1;
    }
}

/// [`find_alpha`] for each `λ`, order preserved, errors inline.
pub fn alpha_curve(
    lambdas: &[BigRational],
    bracket_tol: &BigRational,
    g_tol: &BigRational,
    config: &EvalConfig,
) -> Vec<Result<AlphaResult, AlphaError>> {
    lambdas.par_iter().map(|l| find_alpha(l, bracket_tol, g_tol, config)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{pow10, ratio, to_f64};

    #[test]
    fn unit_lambda_bracket() {
        let cfg = EvalConfig::default();
        let tol = pow10(-6);
        let r = find_alpha(&int(1), &tol, &tol, &cfg).unwrap();
        assert!(r.m_lo > int(0) && r.m_hi < int(1) && r.m_lo < r.m_hi);
        assert!(r.width() <= tol);
        assert!(near_one(&r.g_at_mid, &tol));
        assert!(r.g_lo.hi < int(1) && r.g_hi.lo > int(1));
        assert!(r.recertify(&pow10(-12), &cfg).unwrap());
        // independent value from a Bessel-order root solve: 0.4496256736...
        assert!((to_f64(&r.midpoint()) - 0.449_625_673_6).abs() < 1e-6);
    }

    #[test]
    fn start_bracket_values() {
        let cfg = EvalConfig::default();
        let tol = pow10(-12);
        let (s0, g0, _) = classify(&int(0), &int(1), &tol, &cfg).unwrap();
        let (s1, g1, _) = classify(&int(1), &int(1), &tol, &cfg).unwrap();
        assert_eq!(s0, Some(Side::Below));
        assert_eq!(s1, Some(Side::Above));
        assert!((to_f64(&g0.lo) - 0.6978).abs() < 1e-4);
        assert!((to_f64(&g1.lo) - 1.4331).abs() < 1e-4);
    }

    #[test]
    fn curve_preserves_order() {
        let cfg = EvalConfig::default();
        let tol = pow10(-4);
        let lambdas = vec![ratio(1, 2), int(1), int(2)];
        let out = alpha_curve(&lambdas, &tol, &tol, &cfg);
        assert_eq!(out.len(), 3);
        for (l, r) in lambdas.iter().zip(&out) {
            let r = r.as_ref().unwrap();
            assert_eq!(&r.lambda, l);
            assert!(r.m_lo > int(0) && r.m_hi < int(1));
        }
        assert_eq!(alpha_curve(&[int(1)], &tol, &tol, &cfg).len(), 1);
        assert!(alpha_curve(&[], &tol, &tol, &cfg).is_empty());
    }

    #[test]
    fn bad_inputs() {
        let cfg = EvalConfig::default();
        assert!(matches!(find_alpha(&int(0), &pow10(-3), &pow10(-3), &cfg), Err(AlphaError::Domain(_))));
        assert!(matches!(find_alpha(&int(1), &int(0), &pow10(-3), &cfg), Err(AlphaError::Eval(_))));
    }

    #[test]
    fn each_accepted_step_halves() {
        let cfg = EvalConfig::default();
        let r = find_alpha(&int(2), &pow10(-6), &pow10(-6), &cfg).unwrap();
        // width is exactly 2^-iterations
        let expected = BigRational::new(1.into(), num_bigint::BigInt::from(1) << r.iterations);
        assert_eq!(r.width(), expected);
    }
}
