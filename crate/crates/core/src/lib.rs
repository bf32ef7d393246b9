//! Certified evaluation of the continued fraction
//!
//! ```text
//! G(m, λ) = mλ + 1/((m+1)λ + 1/((m+2)λ + ...))
//! ```
//!
//! for `m > -1`, `λ > 0`, together with certificates for the inequalities
//! and identities it satisfies:
//!
//! * [`cf_core`] evaluates the convergent recurrence exactly (big rationals)
//!   or with outward-rounded binary arithmetic, and brackets the limit.
//! * [`bounds`] encloses `B(m, λ) = mλ/2 + sqrt(m²λ²/4 + 1)` and certifies
//!   `G(m+1, λ) > B(m, λ) > G(m, λ)`, the shift identity and friends.
//! * [`alpha_root`] brackets the parameter `α(λ) ∈ (0, 1)` with `G(α, λ) = 1`.
//! * [`lambda_scan`] sweeps `λ` at fixed `m`, checks the `λ → 0+` limit and
//!   searches for a certified decrease of `λ ↦ G(m, λ)`.
//! * [`bessel_oracle`] recomputes `G` for integer `m` from truncated Bessel
//!   series with rigorous tail bounds.
//! * [`cli`] is the command-line front end.
//!
//! Every certificate is a comparison of two closed intervals with exact
//! rational endpoints; nothing certified goes through `f64`.

pub mod alpha_root;
pub mod bessel_oracle;
pub mod bounds;
pub mod cf_core;
pub mod cli;
pub mod dyadic;
pub mod lambda_scan;
pub mod rational;

pub use alpha_root::{alpha_curve, find_alpha, AlphaError, AlphaResult};
pub use bessel_oracle::{cross_check, series_ratio, CrossCheckError, OracleError, SeriesEnclosure};
pub use bounds::{
    check_functional_equation, check_g_above_one, check_reciprocal, check_sandwich, theorem_bound, BoundValue,
    CheckError, CheckReport, Claim,
};
pub use cf_core::{
    advance, eval_directed, eval_enclosure, evaluate, tail_enclosure, term, CfError, CfPoint, ConvergentPair,
    DomainError, Enclosure, EvalConfig, Mode,
};
pub use lambda_scan::{
    default_limit_grid, default_witness_grid, default_witness_ms, find_witness, limit_check, scan, LimitPoint,
    ScanError, ScanPoint, Witness,
};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
