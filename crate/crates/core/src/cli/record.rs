use std::collections::BTreeMap;
use std::io::{self, Write};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bounds::{CheckReport, Claim};
use crate::cf_core::Enclosure;
use crate::rational::{format_directed, to_fraction_string, Direction};

pub const CSV_HEADER: [&str; 8] = ["command", "m", "lambda", "lo", "hi", "depth", "certified", "mode"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One emitted line. `lo` is rounded toward `-inf` and `hi` toward `+inf`
/// at the chosen number of significant digits; inputs are exact `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub lo: String,
    pub hi: String,
    pub depth: usize,
    pub certified: Option<bool>,
    pub mode: String,
}

pub(crate) fn inputs(pairs: &[(&str, &BigRational)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), to_fraction_string(v))).collect()
}

impl OutputRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn interval(
        command: impl Into<String>,
        inputs: BTreeMap<String, String>,
        lo: &BigRational,
        hi: &BigRational,
        depth: usize,
        certified: Option<bool>,
        mode: &str,
        digits: u32,
    ) -> Self {
        Self {
            command: command.into(),
            inputs,
            lo: format_directed(lo, digits, Direction::Down),
            hi: format_directed(hi, digits, Direction::Up),
            depth,
            certified,
            mode: mode.to_string(),
        }
    }

    pub fn enclosure(
        command: impl Into<String>,
        inputs: BTreeMap<String, String>,
        enc: &Enclosure,
        certified: Option<bool>,
        digits: u32,
    ) -> Self {
        Self::interval(command, inputs, &enc.lo, &enc.hi, enc.depth, certified, enc.mode.as_str(), digits)
    }

    /// Record for a claim: `lo`/`hi` hold [`margin`] of the report.
    /// Check records are named `check:<claim id>`; oracle records `oracle`.
    pub fn check(report: &CheckReport, digits: u32) -> Self {
        let (lo, hi) = margin(report);
        let mut inp = inputs(&[("m", report.point.m()), ("lambda", report.point.lambda()), ("tol", &report.tol)]);
        if report.claim == Claim::Reciprocal {
            inp.remove("m");
        }
        Self::interval(
            match report.claim {
                Claim::OracleAgreement => "oracle".to_string(),
                claim => format!("check:{}", claim.id()),
            },
            inp,
            &lo,
            &hi,
            report.left.depth.max(report.right.depth),
            Some(report.certified),
            report.left.mode.as_str(),
            digits,
        )
    }

    pub fn input(&self, key: &str) -> Option<&str> {
        self.inputs.get(key).map(String::as_str)
    }

    fn csv_row(&self) -> [String; 8] {
        let get = |k: &str| self.inputs.get(k).cloned().unwrap_or_default();
        [
            self.command.clone(),
            get("m"),
            get("lambda"),
            self.lo.clone(),
            self.hi.clone(),
            self.depth.to_string(),
            self.certified.map(|c| c.to_string()).unwrap_or_default(),
            self.mode.clone(),
        ]
    }
}

/// Interval summarising a claim.
///
/// Inequalities and identities use `left - right` (positive lower end
/// certifies an inequality; containing 0 is consistent with an identity).
/// The reciprocal claim uses the product `G(0, λ) G(1, λ)`.
pub fn margin(report: &CheckReport) -> (BigRational, BigRational) {
    match report.claim {
        Claim::Reciprocal => report.product(),
        _ => (&report.left.lo - &report.right.hi, &report.left.hi - &report.right.lo),
    }
}

pub fn write_records(out: &mut dyn Write, records: &[OutputRecord], format: Format) -> io::Result<()> {
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
            Ok(())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in records {
                w.write_record(r.csv_row())?;
            }
            w.flush()
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected CSV header {0:?}")]
    Header(Vec<String>),
    #[error("bad certified field {0:?}")]
    Certified(String),
}

/// Parses output written by [`write_records`]. CSV rows only carry the
/// `m` and `lambda` inputs.
pub fn read_records(text: &str, format: Format) -> Result<Vec<OutputRecord>, ReadError> {
    match format {
        Format::Json => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(ReadError::from))
            .collect(),
        Format::Csv => {
            let mut rd = csv::Reader::from_reader(text.as_bytes());
            let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
            if header != CSV_HEADER {
                return Err(ReadError::Header(header));
            }
            let mut out = Vec::new();
            for row in rd.records() {
                let row = row?;
                let mut inputs = BTreeMap::new();
                for (k, i) in [("m", 1), ("lambda", 2)] {
                    if !row[i].is_empty() {
                        inputs.insert(k.to_string(), row[i].to_string());
                    }
                }
                let certified = match &row[6] {
                    "" => None,
                    "true" => Some(true),
                    "false" => Some(false),
                    other => return Err(ReadError::Certified(other.to_string())),
                };
                out.push(OutputRecord {
                    command: row[0].to_string(),
                    inputs,
                    lo: row[3].to_string(),
                    hi: row[4].to_string(),
                    depth: row[5].parse().unwrap_or(0),
                    certified,
                    mode: row[7].to_string(),
                });
            }
            Ok(out)
        }
    }
}

/// Everything but `inputs` keys absent from CSV must match between the two
/// encodings of one run.
pub fn same_values(json: &OutputRecord, csv: &OutputRecord) -> bool {
    let shared = |k: &str| json.inputs.get(k) == csv.inputs.get(k);
    json.command == csv.command
        && shared("m")
        && shared("lambda")
        && json.lo == csv.lo
        && json.hi == csv.hi
        && json.depth == csv.depth
        && json.certified == csv.certified
        && json.mode == csv.mode
}
