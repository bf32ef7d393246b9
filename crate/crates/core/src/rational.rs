//! Small helpers around [`BigRational`]: construction, exact parsing of
//! decimal and `p/q` strings, and directed decimal formatting.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// `n / d` as a big rational. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `10^e` exactly, for any sign of `e`.
pub fn pow10(e: i32) -> BigRational {
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

pub fn midpoint(a: &BigRational, b: &BigRational) -> BigRational {
    (a + b) / int(2)
}

/// Canonical `p/q` form (lowest terms, `q > 0`, always with a slash).
pub fn to_fraction_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Nearest `f64`, for diagnostics and plotting only.
pub fn to_f64(r: &BigRational) -> f64 {
    // Scale so numerator and denominator both fit comfortably.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb - db) - 60;
    let scaled = if shift > 0 {
        BigRational::new(r.numer().clone(), r.denom() << (shift as usize))
    } else {
        BigRational::new(r.numer() << ((-shift) as usize), r.denom().clone())
    };
    let q = scaled.to_integer();
    let f: f64 = q.to_string().parse().unwrap_or(f64::NAN);
    f * 2f64.powi(shift.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty number")]
    Empty,
    #[error("invalid number syntax: {0:?}")]
    Syntax(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parses `p/q`, integers, and decimal or scientific literals (`0.1`,
/// `-2.5e-3`, `.5`, `1E9`) into exact rationals. `"0.1"` is exactly `1/10`.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_decimal(p.trim()).ok_or_else(|| ParseRationalError::Syntax(s.into()))?;
        let q = parse_decimal(q.trim()).ok_or_else(|| ParseRationalError::Syntax(s.into()))?;
        if q.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.into()));
        }
        return Ok(p / q);
    }
    parse_decimal(s).ok_or_else(|| ParseRationalError::Syntax(s.into()))
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (negative, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().ok()?;
    let scale = exponent.checked_sub(i32::try_from(frac_part.len()).ok()?)?;
    let value = BigRational::from_integer(n) * pow10(scale);
    Some(if negative { -value } else { value })
}

/// Rounding direction for decimal output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Down,
    Up,
}

/// Formats `r` with `digits` significant decimal digits, rounded toward
/// `-inf` ([`Direction::Down`]) or `+inf` ([`Direction::Up`]).
///
/// Positional notation is used for moderate exponents and scientific
/// otherwise; both forms re-parse exactly with [`parse_rational`].
pub fn format_directed(r: &BigRational, digits: u32, dir: Direction) -> String {
    assert!(digits >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let e = decimal_exponent(&r.abs());
    // r * 10^(digits-1-e) has `digits` integer digits (before rounding).
    let shift = digits as i32 - 1 - e;
    let scaled = r * pow10(shift);
    let mut n = match dir {
        Direction::Down => scaled.floor().to_integer(),
        Direction::Up => scaled.ceil().to_integer(),
    };
    let mut exp10 = -shift;
    // Rounding can carry into an extra digit (e.g. 9.99.. -> 10.0..).
    let limit = num_traits::pow(BigInt::from(10), digits as usize);
    if n.abs() >= limit {
        let (q, rem) = n.div_mod_floor(&BigInt::from(10));
        n = if rem.is_zero() || dir == Direction::Down { q } else { q + 1 };
        exp10 += 1;
    }
    render(&n, exp10)
}

/// `floor(log10(x))` for `x > 0`, computed exactly.
fn decimal_exponent(x: &BigRational) -> i32 {
    let approx = (x.numer().bits() as f64 - x.denom().bits() as f64) * std::f64::consts::LOG10_2;
    let mut e = approx.floor() as i32;
    while &pow10(e) > x {
        e -= 1;
    }
    while &pow10(e + 1) <= x {
        e += 1;
    }
    e
}

fn render(n: &BigInt, exp10: i32) -> String {
    let negative = n.sign() == Sign::Minus;
    let mut digits = n.abs().to_string();
    // Drop trailing zeros into the exponent.
    let mut exp10 = exp10;
    while digits.len() > 1 && digits.ends_with('0') {
        digits.pop();
        exp10 += 1;
    }
    let sign = if negative { "-" } else { "" };
    let len = digits.len() as i32;
    // Position of the decimal point measured from the left of `digits`.
    let point = len + exp10;
    let body = if exp10 >= 0 && point <= 21 {
        format!("{digits}{}", "0".repeat(exp10 as usize))
    } else if point > 0 && exp10 < 0 {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    } else if point <= 0 && point > -6 {
        format!("0.{}{digits}", "0".repeat((-point) as usize))
    } else {
        let (a, b) = digits.split_at(1);
        let e = point - 1;
        if b.is_empty() {
            format!("{a}e{e}")
        } else {
            format!("{a}.{b}e{e}")
        }
    };
    format!("{sign}{body}")
}

/// Total order helper for readability at call sites.
pub fn max_ref<'a>(a: &'a BigRational, b: &'a BigRational) -> &'a BigRational {
    match a.cmp(b) {
        Ordering::Less => b,
        _ => a,
    }
}

pub fn min_ref<'a>(a: &'a BigRational, b: &'a BigRational) -> &'a BigRational {
    match a.cmp(b) {
        Ordering::Greater => b,
        _ => a,
    }
}

/// Display wrapper printing a rational as a short float, for messages.
pub struct Approx<'a>(pub &'a BigRational);

impl fmt::Display for Approx<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12e}", to_f64(self.0))
    }
}
