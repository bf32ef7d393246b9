//! Sweeps of `λ ↦ G(m, λ)` at fixed `m`: the `λ → 0+` limit and a
//! certified decrease witnessing that the map is not monotonically
//! increasing.

use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::tightening_schedule;
use crate::cf_core::{evaluate, CfError, CfPoint, DomainError, Enclosure, EvalConfig};
use crate::rational::{int, ratio};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScanError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("tolerance must be positive")]
    NonPositiveTolerance,
    #[error("grid must be strictly {0} and positive")]
    BadGrid(&'static str),
    #[error("witness search needs 0 < m < 1 (got {0})")]
    MOutOfRange(BigRational),
    #[error("no certified decrease on this grid (not a refutation)")]
    NoWitnessFound,
}

/// `m` values tried by default when searching for a witness.
pub fn default_witness_ms() -> Vec<BigRational> {
    vec![ratio(1, 10), ratio(1, 4), ratio(1, 2)]
}

/// `λ ∈ {2^-4, ..., 2^2}`.
pub fn default_witness_grid() -> Vec<BigRational> {
    (-4..=2).map(|e| if e < 0 { ratio(1, 1 << -e) } else { int(1 << e) }).collect()
}

/// `λ ∈ {10^-1, ..., 10^-4}`, descending.
pub fn default_limit_grid() -> Vec<BigRational> {
    (1..=4).map(|e| crate::rational::pow10(-e)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitPoint {
    pub lambda: BigRational,
    pub enclosure: Result<Enclosure, CfError>,
}

impl LimitPoint {
    /// `|midpoint - 1|` of the enclosure, or of the best one on failure.
    pub fn distance_to_one(&self) -> Option<BigRational> {
        let enc = match &self.enclosure {
            Ok(e) => e,
            Err(e) => e.best()?,
        };
        Some((enc.midpoint() - BigRational::one()).abs())
    }

    /// Largest distance from 1 of any point of the enclosure.
    pub fn radius_from_one(&self) -> Option<BigRational> {
        let enc = self.enclosure.as_ref().ok()?;
        let one = BigRational::one();
        let a = (&enc.lo - &one).abs();
        let b = (&enc.hi - &one).abs();
        Some(if a > b { a } else { b })
    }
}

fn check_positive(tol: &BigRational) -> Result<(), ScanError> {
    if tol.is_positive() {
        Ok(())
    } else {
        Err(ScanError::NonPositiveTolerance)
    }
}

/// Enclosures of `G(m, λ)` along a descending `λ` list.
pub fn limit_check(
    m: &BigRational,
    lambdas: &[BigRational],
    tol: &BigRational,
    config: &EvalConfig,
) -> Result<Vec<LimitPoint>, ScanError> {
    check_positive(tol)?;
    if lambdas.windows(2).any(|w| w[0] <= w[1]) {
        return Err(ScanError::BadGrid("descending"));
    }
    let points = lambdas.iter().map(|l| CfPoint::new(m.clone(), l.clone())).collect::<Result<Vec<_>, _>>()?;
    Ok(points
        .par_iter()
        .map(|p| LimitPoint { lambda: p.lambda().clone(), enclosure: evaluate(p, tol, config) })
        .collect())
}

fn ascending_points(m: &BigRational, grid: &[BigRational]) -> Result<Vec<CfPoint>, ScanError> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ScanError::BadGrid("ascending"));
    }
    Ok(grid.iter().map(|l| CfPoint::new(m.clone(), l.clone())).collect::<Result<Vec<_>, _>>()?)
}

/// One grid point of a [`scan`].
pub type ScanPoint = (BigRational, Result<Enclosure, CfError>);

/// Pointwise enclosures over an ascending grid, order preserved.
pub fn scan(
    m: &BigRational,
    grid: &[BigRational],
    tol: &BigRational,
    config: &EvalConfig,
) -> Result<Vec<ScanPoint>, ScanError> {
    check_positive(tol)?;
    let points = ascending_points(m, grid)?;
    Ok(points.par_iter().map(|p| (p.lambda().clone(), evaluate(p, tol, config))).collect())
}

/// Certified `G(m, λ1) > G(m, λ2)` with `λ1 < λ2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub m: BigRational,
    pub lambda1: BigRational,
    pub lambda2: BigRational,
    pub g1: Enclosure,
    pub g2: Enclosure,
    /// Tolerances the two enclosures were computed at.
    pub tol1: BigRational,
    pub tol2: BigRational,
}

impl Witness {
    pub fn gap(&self) -> BigRational {
        &self.g1.lo - &self.g2.hi
    }

    /// Recomputes both enclosures from scratch at the stored tolerances.
    pub fn recertify(&self, config: &EvalConfig) -> Result<(Enclosure, Enclosure, bool), CfError> {
        let g1 = evaluate(&CfPoint::new(self.m.clone(), self.lambda1.clone())?, &self.tol1, config)?;
        let g2 = evaluate(&CfPoint::new(self.m.clone(), self.lambda2.clone())?, &self.tol2, config)?;
        let ok = g1.lo > g2.hi;
        Ok((g1, g2, ok))
    }
}

struct Slot {
    lambda: BigRational,
    point: CfPoint,
    tol: BigRational,
    enclosure: Option<Enclosure>,
}

/// First lexicographic grid pair `(i < j)` certifying `G(m, λ_i) > G(m, λ_j)`.
///
/// A pair whose midpoints already point the right way but whose enclosures
/// overlap is a near miss: both ends are re-evaluated at tighter
/// tolerances down to the configured floor.
pub fn find_witness(
    m: &BigRational,
    grid: &[BigRational],
    tol: &BigRational,
    config: &EvalConfig,
) -> Result<Witness, ScanError> {
    check_positive(tol)?;
    if !(m.is_positive() && m < &BigRational::one()) {
        return Err(ScanError::MOutOfRange(m.clone()));
    }
    let points = ascending_points(m, grid)?;
    let mut slots: Vec<Slot> = points
        .into_par_iter()
        .map(|point| {
            let enclosure = evaluate(&point, tol, config).ok();
            Slot { lambda: point.lambda().clone(), point, tol: tol.clone(), enclosure }
        })
        .collect();

    let schedule = tightening_schedule(tol, &config.tol_floor);
    for i in 0..slots.len() {
        for j in i + 1..slots.len() {
            let (Some(a), Some(b)) = (&slots[i].enclosure, &slots[j].enclosure) else { continue };
            if a.lo > b.hi {
                return Ok(witness(m, (&slots[i], a), (&slots[j], b)));
            }
            if a.midpoint() <= b.midpoint() {
                continue;
            }
            for t in schedule.iter().skip(1) {
                for k in [i, j] {
                    if &slots[k].tol > t {
                        if let Ok(e) = evaluate(&slots[k].point, t, config) {
                            slots[k].enclosure = Some(e);
                            slots[k].tol = t.clone();
                        }
                    }
                }
                let (Some(a), Some(b)) = (&slots[i].enclosure, &slots[j].enclosure) else { break };
                if a.lo > b.hi {
                    return Ok(witness(m, (&slots[i], a), (&slots[j], b)));
                }
            }
        }
    }
    Err(ScanError::NoWitnessFound)
}

fn witness(m: &BigRational, (a, ga): (&Slot, &Enclosure), (b, gb): (&Slot, &Enclosure)) -> Witness {
    Witness {
        m: m.clone(),
        lambda1: a.lambda.clone(),
        lambda2: b.lambda.clone(),
        g1: ga.clone(),
        g2: gb.clone(),
        tol1: a.tol.clone(),
        tol2: b.tol.clone(),
    }
}
