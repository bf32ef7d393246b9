//! Re-verification of emitted records: parse the decimals back to exact
//! rationals, recompute from the record's inputs and confirm the verdict.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::record::{margin, OutputRecord};
use crate::bessel_oracle::{cross_check, CrossCheckError};
use crate::bounds::{
    check_functional_equation, check_g_above_one, check_reciprocal, check_sandwich, CheckError, CheckReport, Claim,
};
use crate::cf_core::{eval_directed, eval_enclosure, CfError, CfPoint, Enclosure, EvalConfig};
use crate::rational::{parse_rational, pow10};

fn field(rec: &OutputRecord, key: &str) -> Result<BigRational, String> {
    let s = rec.input(key).ok_or_else(|| format!("{}: missing input {key}", rec.command))?;
    parse_rational(s).map_err(|e| format!("{}: {key}: {e}", rec.command))
}

fn decimals(rec: &OutputRecord) -> Result<(BigRational, BigRational), String> {
    let lo = parse_rational(&rec.lo).map_err(|e| format!("lo: {e}"))?;
    let hi = parse_rational(&rec.hi).map_err(|e| format!("hi: {e}"))?;
    if lo > hi {
        return Err(format!("{}: lo {} > hi {}", rec.command, rec.lo, rec.hi));
    }
    Ok((lo, hi))
}

fn tol_of(rec: &OutputRecord, default_tol: &BigRational) -> Result<BigRational, String> {
    if rec.input("tol").is_some() {
        field(rec, "tol")
    } else {
        Ok(default_tol.clone())
    }
}

fn enclose_like(
    rec: &OutputRecord,
    point: &CfPoint,
    tol: &BigRational,
    config: &EvalConfig,
) -> Result<Enclosure, String> {
    let result = match rec.mode.as_str() {
        "exact" => eval_enclosure(point, tol, config.max_depth),
        "directed" => eval_directed(point, tol, config.precision_bits, config.max_depth),
        other => return Err(format!("unknown mode {other:?}")),
    };
    match result {
        Ok(e) => Ok(e),
        Err(CfError::BudgetExceeded { best, .. }) | Err(CfError::NotConverged { best, .. }) => Ok(*best),
        Err(e) => Err(e.to_string()),
    }
}

fn expect_inside(rec: &OutputRecord, lo: &BigRational, hi: &BigRational) -> Result<(), String> {
    let (dlo, dhi) = decimals(rec)?;
    if &dlo <= lo && hi <= &dhi {
        Ok(())
    } else {
        Err(format!("{}: recomputed interval escapes [{}, {}]", rec.command, rec.lo, rec.hi))
    }
}

fn reports_for(
    claim: Claim,
    point: &CfPoint,
    tol: &BigRational,
    config: &EvalConfig,
) -> Result<Vec<CheckReport>, String> {
    let result = match claim {
        Claim::SandwichUpper | Claim::SandwichLower => check_sandwich(point, tol, config).map(|(a, b)| vec![a, b]),
        Claim::FunctionalEquation => check_functional_equation(point, tol, config).map(|r| vec![r]),
        Claim::AboveOne => check_g_above_one(point, tol, config).map(|r| vec![r]),
        Claim::Reciprocal => check_reciprocal(point.lambda(), tol, config).map(|r| vec![r]),
        Claim::OracleAgreement => {
            let m: u32 =
                point.m().to_integer().try_into().map_err(|_| "oracle m must be a small integer".to_string())?;
            return match cross_check(m, point.lambda(), tol, config) {
                Ok(r) => Ok(vec![r]),
                Err(CrossCheckError::Check(CheckError::Violation(r))) => Ok(r),
                Err(e) => Err(e.to_string()),
            };
        }
    };
    match result {
        Ok(r) => Ok(r),
        Err(CheckError::Inconclusive(r)) | Err(CheckError::Violation(r)) => Ok(r),
        Err(e) => Err(e.to_string()),
    }
}

/// The decimals alone must still carry the verdict they claim.
fn decimal_verdict(claim: Claim, lo: &BigRational, hi: &BigRational) -> bool {
    if claim.is_inequality() {
        lo.is_positive()
    } else if claim == Claim::Reciprocal {
        lo <= &BigRational::one() && &BigRational::one() <= hi
    } else {
        !lo.is_positive() && !hi.is_negative()
    }
}

/// Re-checks one record. CSV records carry no `tol`; `default_tol` (the
/// tolerance of the producing run) stands in.
pub fn reverify(rec: &OutputRecord, default_tol: &BigRational, config: &EvalConfig) -> Result<(), String> {
    let command = rec.command.as_str();
    match command {
        "eval" | "scan" | "alpha:g" | "witness:g1" | "witness:g2" => {
            let point = CfPoint::new(field(rec, "m")?, field(rec, "lambda")?).map_err(|e| e.to_string())?;
            let tol = tol_of(rec, default_tol)?;
            let fresh = enclose_like(rec, &point, &tol, config)?;
            expect_inside(rec, &fresh.lo, &fresh.hi)
        }
        "alpha" => {
            let lambda = field(rec, "lambda")?;
            let (m_lo, m_hi) = decimals(rec)?;
            if !(m_lo.is_positive() && m_hi < BigRational::one()) {
                return Err(format!("alpha bracket [{}, {}] not inside (0, 1)", rec.lo, rec.hi));
            }
            let tol = pow10(-20);
            let below = crate::cli::enclose(&m_lo, &lambda, &tol, config).map_err(|e| e.to_string())?;
            let above = crate::cli::enclose(&m_hi, &lambda, &tol, config).map_err(|e| e.to_string())?;
            let confirmed = below.hi < BigRational::one() && above.lo > BigRational::one();
            if Some(confirmed) == rec.certified {
                Ok(())
            } else {
                Err(format!("alpha at λ = {lambda}: endpoint certificates do not re-verify"))
            }
        }
        _ => {
            let claim_id = match command.split_once(':') {
                Some(("check", id)) => id,
                None if command == "oracle" => "oracle",
                _ => return Err(format!("unknown command {command:?}")),
            };
            let claim = Claim::from_id(claim_id).ok_or_else(|| format!("unknown claim {claim_id:?}"))?;
            let m = if claim == Claim::Reciprocal { BigRational::zero() } else { field(rec, "m")? };
            let point = CfPoint::new(m, field(rec, "lambda")?).map_err(|e| e.to_string())?;
            let tol = tol_of(rec, default_tol)?;
            let reports = reports_for(claim, &point, &tol, config)?;
            let report =
                reports.iter().find(|r| r.claim == claim).ok_or_else(|| format!("{command}: claim not reproduced"))?;
            if Some(report.certified) != rec.certified {
                return Err(format!("{command}: verdict flipped on re-run"));
            }
            let (dlo, dhi) = decimals(rec)?;
            if report.certified && !decimal_verdict(claim, &dlo, &dhi) {
                return Err(format!("{command}: emitted decimals do not carry the certificate"));
            }
            if rec.input("tol").is_some() && report.tol == tol {
                let (lo, hi) = margin(report);
                expect_inside(rec, &lo, &hi)?;
            }
            Ok(())
        }
    }
}

/// Both witness records re-verify and their decimals alone certify
/// `G(m, λ1) > G(m, λ2)` with `λ1 < λ2`.
pub fn reverify_witness_pair(
    g1: &OutputRecord,
    g2: &OutputRecord,
    default_tol: &BigRational,
    config: &EvalConfig,
) -> Result<(), String> {
    reverify(g1, default_tol, config)?;
    reverify(g2, default_tol, config)?;
    if field(g1, "lambda")? >= field(g2, "lambda")? {
        return Err("witness λ1 must be below λ2".into());
    }
    let (lo1, _) = decimals(g1)?;
    let (_, hi2) = decimals(g2)?;
    if lo1 > hi2 {
        Ok(())
    } else {
        Err("witness decimals overlap".into())
    }
}
