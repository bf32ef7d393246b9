//! Command-line front end.
//!
//! Subcommands: `eval`, `check`, `alpha`, `scan`, `witness`, `oracle`.
//! Output is newline-delimited JSON or CSV with the fixed header
//! `command,m,lambda,lo,hi,depth,certified,mode`, written in input order
//! after the command finishes. Exit codes:
//!
//! | code | outcome |
//! |------|---------|
//! | 0 | ok |
//! | 1 | usage or domain error |
//! | 2 | not converged within the depth budget |
//! | 3 | inconclusive certificate |
//! | 4 | no witness on the grid |
//! | 5 | identity violated (internal arithmetic bug) |

mod record;
mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Signed;

use crate::alpha_root::{alpha_curve, AlphaError, AlphaResult};
use crate::bessel_oracle::{cross_check, CrossCheckError};
use crate::bounds::{
    check_functional_equation, check_g_above_one, check_reciprocal, check_sandwich, CheckError, CheckReport,
};
use crate::cf_core::{eval_directed, eval_enclosure, evaluate, CfError, CfPoint, Enclosure, EvalConfig};
use crate::lambda_scan::{default_witness_grid, find_witness, scan, ScanError};
use crate::rational::{midpoint, parse_rational, pow10, to_f64};

use record::inputs;
pub use record::{margin, read_records, same_values, write_records, Format, OutputRecord, ReadError, CSV_HEADER};
pub use verify::{reverify, reverify_witness_pair};

/// Exit status, ordered by precedence when a run mixes outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Ok,
    NoWitness,
    Inconclusive,
    NotConverged,
    Violation,
    Usage,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Usage => 1,
            Outcome::NotConverged => 2,
            Outcome::Inconclusive => 3,
            Outcome::NoWitness => 4,
            Outcome::Violation => 5,
        }
    }

    fn merge(self, other: Outcome) -> Outcome {
        self.max(other)
    }
}

fn rational_arg(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn positive_rational_arg(s: &str) -> Result<BigRational, String> {
    let r = rational_arg(s)?;
    if r.is_positive() {
        Ok(r)
    } else {
        Err(format!("{s} is not positive"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "cfbound", version, about = "Certified enclosures of the continued fraction G(m, λ)")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Absolute enclosure width target (decimal or p/q).
    #[arg(long, global = true, default_value = "1e-12", value_parser = positive_rational_arg)]
    pub tol: BigRational,
    #[arg(long, global = true, env = "MAX_DEPTH", default_value_t = 10_000)]
    pub max_depth: usize,
    #[arg(long, global = true, default_value_t = 128)]
    pub precision_bits: u32,
    /// Significant digits of emitted decimals.
    #[arg(long, global = true, default_value_t = 15, value_parser = clap::value_parser!(u32).range(1..=60))]
    pub digits: u32,
    /// Smallest tolerance adaptive tightening may reach.
    #[arg(long, global = true, default_value = "1e-30", value_parser = positive_rational_arg)]
    pub tol_floor: BigRational,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMode {
    Auto,
    Exact,
    Directed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClaimArg {
    Sandwich,
    Functional,
    AboveOne,
    Reciprocal,
}

#[derive(Debug, Args, Clone, Default)]
pub struct GridArgs {
    /// Geometric grid `lo:hi:count`.
    #[arg(long, conflicts_with = "grid_list")]
    pub grid_geom: Option<String>,
    /// Explicit comma-separated grid.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_list: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enclose G(m, λ).
    Eval {
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        m: BigRational,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        lambda: BigRational,
        #[arg(long, value_enum, default_value = "auto")]
        mode: EvalMode,
    },
    /// Certify one of the claims at a point.
    Check {
        #[arg(value_enum)]
        claim: ClaimArg,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        m: Option<BigRational>,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        lambda: BigRational,
    },
    /// Bracket α(λ) with G(α, λ) = 1.
    Alpha {
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        lambda: Option<BigRational>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "1e-6", value_parser = positive_rational_arg)]
        bracket_tol: BigRational,
        #[arg(long, default_value = "1e-6", value_parser = positive_rational_arg)]
        g_tol: BigRational,
    },
    /// Enclosures of G(m, λ) over a λ grid (default 2^-4..2^2).
    Scan {
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        m: BigRational,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Search a λ grid for a certified decrease of G(m, ·).
    Witness {
        #[arg(long, default_value = "1/10", allow_hyphen_values = true, value_parser = rational_arg)]
        m: BigRational,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Compare the convergent engine with the Bessel series (integer m).
    Oracle {
        #[arg(long)]
        m: u32,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        lambda: BigRational,
    },
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GridError {
    #[error("--grid-geom expects lo:hi:count, got {0:?}")]
    GeomSyntax(String),
    #[error("grid needs 0 < lo < hi and count >= 1")]
    GeomRange,
    #[error("bad grid value: {0}")]
    Value(String),
}

/// Geometric grid from `lo:hi:count`. Interior points are rounded to 12
/// significant digits and then taken as exact rationals; ends are exact.
pub fn parse_grid_geom(text: &str) -> Result<Vec<BigRational>, GridError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(GridError::GeomSyntax(text.to_string()));
    };
    let lo = parse_rational(lo).map_err(|e| GridError::Value(e.to_string()))?;
    let hi = parse_rational(hi).map_err(|e| GridError::Value(e.to_string()))?;
    let count: usize = count.trim().parse().map_err(|_| GridError::GeomSyntax(text.to_string()))?;
    if !lo.is_positive() || count == 0 || (count > 1 && hi <= lo) {
        return Err(GridError::GeomRange);
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (flo, fhi) = (to_f64(&lo), to_f64(&hi));
    let step = (fhi / flo).powf(1.0 / (count - 1) as f64);
    let mut grid = Vec::with_capacity(count);
    grid.push(lo.clone());
    for i in 1..count - 1 {
        let v = flo * step.powi(i as i32);
        let r = parse_rational(&format!("{v:.11e}")).map_err(|e| GridError::Value(e.to_string()))?;
        grid.push(r);
    }
    grid.push(hi);
    Ok(grid)
}

pub fn parse_grid_list(text: &str) -> Result<Vec<BigRational>, GridError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_rational(s).map_err(|e| GridError::Value(e.to_string())))
        .collect()
}

impl GridArgs {
    fn resolve(&self) -> Result<Option<Vec<BigRational>>, GridError> {
        match (&self.grid_geom, &self.grid_list) {
            (Some(g), _) => parse_grid_geom(g).map(Some),
            (None, Some(l)) => parse_grid_list(l).map(Some),
            (None, None) => Ok(None),
        }
    }
}

struct Session<'a> {
    config: EvalConfig,
    tol: BigRational,
    digits: u32,
    records: Vec<OutputRecord>,
    outcome: Outcome,
    err: &'a mut dyn Write,
}

impl Session<'_> {
    fn note(&mut self, outcome: Outcome, msg: impl std::fmt::Display) {
        let _ = writeln!(self.err, "cfbound: {msg}");
        self.outcome = self.outcome.merge(outcome);
    }

    fn push(&mut self, r: OutputRecord) {
        self.records.push(r);
    }

    fn push_reports(&mut self, reports: &[CheckReport]) {
        for r in reports {
            let rec = OutputRecord::check(r, self.digits);
            self.push(rec);
        }
    }

    fn cf_failure(&mut self, command: &str, point: &CfPoint, e: &CfError) {
        if let Some(best) = e.best() {
            let rec = OutputRecord::enclosure(command, self.point_inputs(point), best, Some(false), self.digits);
            self.push(rec);
            self.note(Outcome::NotConverged, e);
        } else {
            self.note(Outcome::Usage, e);
        }
    }

    fn point_inputs(&self, p: &CfPoint) -> std::collections::BTreeMap<String, String> {
        inputs(&[("m", p.m()), ("lambda", p.lambda()), ("tol", &self.tol)])
    }

    fn check_failure(&mut self, e: &CheckError) {
        match e {
            CheckError::Inconclusive(reports) => {
                self.push_reports(reports);
                self.note(Outcome::Inconclusive, e);
            }
            CheckError::Violation(reports) => {
                self.push_reports(reports);
                self.note(Outcome::Violation, e);
            }
            CheckError::Eval(inner) if inner.best().is_some() => self.note(Outcome::NotConverged, e),
            _ => self.note(Outcome::Usage, e),
        }
    }

    fn eval(&mut self, m: BigRational, lambda: BigRational, mode: EvalMode) {
        let point = match CfPoint::new(m, lambda) {
            Ok(p) => p,
            Err(e) => return self.note(Outcome::Usage, e),
        };
        let result = match mode {
            EvalMode::Auto => evaluate(&point, &self.tol, &self.config),
            EvalMode::Exact => eval_enclosure(&point, &self.tol, self.config.max_depth),
            EvalMode::Directed => eval_directed(&point, &self.tol, self.config.precision_bits, self.config.max_depth),
        };
        match result {
            Ok(enc) => {
                let rec = OutputRecord::enclosure("eval", self.point_inputs(&point), &enc, None, self.digits);
                self.push(rec);
            }
            Err(e) => self.cf_failure("eval", &point, &e),
        }
    }

    fn check(&mut self, claim: ClaimArg, m: Option<BigRational>, lambda: BigRational) {
        if claim == ClaimArg::Reciprocal {
            match check_reciprocal(&lambda, &self.tol, &self.config) {
                Ok(r) => self.push_reports(&[r]),
                Err(e) => self.check_failure(&e),
            }
            return;
        }
        let Some(m) = m else {
            return self.note(Outcome::Usage, "--m is required for this claim");
        };
        let point = match CfPoint::new(m, lambda) {
            Ok(p) => p,
            Err(e) => return self.note(Outcome::Usage, e),
        };
        let result = match claim {
            ClaimArg::Sandwich => check_sandwich(&point, &self.tol, &self.config).map(|(a, b)| vec![a, b]),
            ClaimArg::Functional => check_functional_equation(&point, &self.tol, &self.config).map(|r| vec![r]),
            ClaimArg::AboveOne => check_g_above_one(&point, &self.tol, &self.config).map(|r| vec![r]),
            ClaimArg::Reciprocal => unreachable!(),
        };
        match result {
            Ok(reports) => self.push_reports(&reports),
            Err(e) => self.check_failure(&e),
        }
    }

    fn alpha_records(&mut self, r: &AlphaResult, certified: bool, bracket_tol: &BigRational, g_tol: &BigRational) {
        let inp = inputs(&[("lambda", &r.lambda), ("bracket_tol", bracket_tol), ("g_tol", g_tol)]);
        let rec = OutputRecord::interval(
            "alpha",
            inp,
            &r.m_lo,
            &r.m_hi,
            r.iterations,
            Some(certified),
            r.g_at_mid.mode.as_str(),
            self.digits,
        );
        self.push(rec);
        let mid = midpoint(&r.m_lo, &r.m_hi);
        let inp = inputs(&[("m", &mid), ("lambda", &r.lambda), ("tol", &r.mid_tol)]);
        let rec = OutputRecord::enclosure("alpha:g", inp, &r.g_at_mid, None, self.digits);
        self.push(rec);
    }

    fn alpha(&mut self, lambdas: Vec<BigRational>, bracket_tol: BigRational, g_tol: BigRational) {
        for (lambda, result) in lambdas.iter().zip(alpha_curve(&lambdas, &bracket_tol, &g_tol, &self.config)) {
            match result {
                Ok(r) => self.alpha_records(&r, true, &bracket_tol, &g_tol),
                Err(e) => {
                    if let Some(best) = e.best() {
                        self.alpha_records(best, false, &bracket_tol, &g_tol);
                    }
                    let outcome = match &e {
                        AlphaError::Domain(_) => Outcome::Usage,
                        AlphaError::Eval(inner) if inner.best().is_none() => Outcome::Usage,
                        AlphaError::Eval(_) | AlphaError::BudgetExceeded(_) => Outcome::NotConverged,
                        AlphaError::StartNotCertified(_) | AlphaError::Inconclusive(_) => Outcome::Inconclusive,
                    };
                    self.note(outcome, format!("λ = {lambda}: {e}"));
                }
            }
        }
    }

    fn scan(&mut self, m: BigRational, grid: Vec<BigRational>) {
        match scan(&m, &grid, &self.tol, &self.config) {
            Ok(points) => {
                for (lambda, result) in points {
                    let point = CfPoint::new(m.clone(), lambda).expect("validated by scan");
                    match result {
                        Ok(enc) => {
                            let rec =
                                OutputRecord::enclosure("scan", self.point_inputs(&point), &enc, None, self.digits);
                            self.push(rec);
                        }
                        Err(e) => self.cf_failure("scan", &point, &e),
                    }
                }
            }
            Err(e) => self.note(Outcome::Usage, e),
        }
    }

    fn witness(&mut self, m: BigRational, grid: Vec<BigRational>) {
        match find_witness(&m, &grid, &self.tol, &self.config) {
            Ok(w) => {
                for (tag, lambda, g, tol) in
                    [("witness:g1", &w.lambda1, &w.g1, &w.tol1), ("witness:g2", &w.lambda2, &w.g2, &w.tol2)]
                {
                    let rec = OutputRecord::enclosure(
                        tag,
                        inputs(&[("m", &m), ("lambda", lambda), ("tol", tol)]),
                        g,
                        Some(true),
                        self.digits,
                    );
                    self.push(rec);
                }
            }
            Err(ScanError::NoWitnessFound) => self.note(Outcome::NoWitness, ScanError::NoWitnessFound),
            Err(e) => self.note(Outcome::Usage, e),
        }
    }

    fn oracle(&mut self, m: u32, lambda: BigRational) {
        match cross_check(m, &lambda, &self.tol, &self.config) {
            Ok(r) => {
                let rec = OutputRecord::check(&r, self.digits);
                self.push(rec);
            }
            Err(CrossCheckError::Check(CheckError::Violation(reports))) => {
                for r in &reports {
                    let rec = OutputRecord::check(r, self.digits);
                    self.push(rec);
                }
                self.note(Outcome::Violation, "convergent and series enclosures are disjoint");
            }
            Err(CrossCheckError::Check(e)) => self.check_failure(&e),
            Err(e @ CrossCheckError::Oracle(_)) => self.note(Outcome::NotConverged, e),
        }
    }
}

/// Enclosure helper used by re-verification.
pub(crate) fn enclose(
    m: &BigRational,
    lambda: &BigRational,
    tol: &BigRational,
    config: &EvalConfig,
) -> Result<Enclosure, CfError> {
    evaluate(&CfPoint::new(m.clone(), lambda.clone())?, tol, config)
}

/// Parses `args` (including the program name), runs the command, writes
/// records to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Outcome::Usage.code() } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let config =
        EvalConfig { max_depth: cli.max_depth, precision_bits: cli.precision_bits, tol_floor: cli.tol_floor.clone() };
    if cli.precision_bits < 64 {
        let _ = writeln!(err, "cfbound: --precision-bits must be at least 64");
        return Outcome::Usage.code();
    }
    let mut session =
        Session { config, tol: cli.tol.clone(), digits: cli.digits, records: Vec::new(), outcome: Outcome::Ok, err };

    match cli.command {
        Command::Eval { m, lambda, mode } => session.eval(m, lambda, mode),
        Command::Check { claim, m, lambda } => session.check(claim, m, lambda),
        Command::Alpha { lambda, grid, bracket_tol, g_tol } => match (lambda, grid.resolve()) {
            (_, Err(e)) => session.note(Outcome::Usage, e),
            (Some(_), Ok(Some(_))) => session.note(Outcome::Usage, "give either --lambda or a grid, not both"),
            (Some(l), Ok(None)) => session.alpha(vec![l], bracket_tol, g_tol),
            (None, Ok(Some(g))) => session.alpha(g, bracket_tol, g_tol),
            (None, Ok(None)) => session.note(Outcome::Usage, "--lambda or a grid is required"),
        },
        Command::Scan { m, grid } => match grid.resolve() {
            Ok(g) => session.scan(m, g.unwrap_or_else(default_witness_grid)),
            Err(e) => session.note(Outcome::Usage, e),
        },
        Command::Witness { m, grid } => match grid.resolve() {
            Ok(g) => session.witness(m, g.unwrap_or_else(default_witness_grid)),
            Err(e) => session.note(Outcome::Usage, e),
        },
        Command::Oracle { m, lambda } => session.oracle(m, lambda),
    }

    if let Err(e) = write_records(out, &session.records, cli.format) {
        let _ = writeln!(session.err, "cfbound: write failed: {e}");
        return Outcome::Usage.code();
    }
    session.outcome.code()
}

/// Default CLI tolerance, `10^-12`.
pub fn default_tol() -> BigRational {
    pow10(-12)
}
