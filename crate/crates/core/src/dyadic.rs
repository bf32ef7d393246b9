//! Fixed-precision binary floating point with explicit rounding direction.
//!
//! A [`Dyadic`] is `mantissa * 2^exponent` with a big-integer mantissa.
//! Every operation takes a precision (mantissa bits) and a [`Round`]
//! direction, so lower bounds can be rounded toward `-inf` and upper bounds
//! toward `+inf`. Results convert to exact rationals without loss.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

fn div_round(n: &BigInt, d: &BigInt, round: Round) -> BigInt {
    match round {
        Round::Down => n.div_floor(d),
        Round::Up => -((-n).div_floor(d)),
    }
}

impl Dyadic {
    pub fn zero() -> Self {
        Self { mant: BigInt::zero(), exp: 0 }
    }

    fn rounded(mant: BigInt, exp: i64, prec: u64, round: Round) -> Self {
        if mant.is_zero() {
            return Self::zero();
        }
        let bits = mant.bits();
        if bits <= prec {
            return Self { mant, exp };
        }
        let shift = bits - prec;
        Self { mant: div_round(&mant, &pow2(shift), round), exp: exp + shift as i64 }
    }

    /// Nearest representable value at `prec` bits on the requested side of `r`.
    pub fn from_rational(r: &BigRational, prec: u64, round: Round) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        let nb = r.numer().bits() as i64;
        let db = r.denom().bits() as i64;
        let k = prec as i64 + db - nb + 1;
        let (n, d) = if k >= 0 {
            (r.numer() << (k as u64), r.denom().clone())
        } else {
            (r.numer().clone(), r.denom() << ((-k) as u64))
        };
        Self::rounded(div_round(&n, &d, round), -k, prec, round)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << (self.exp as u64))
        } else {
            BigRational::new(self.mant.clone(), pow2((-self.exp) as u64))
        }
    }

    pub fn signum(&self) -> Sign {
        self.mant.sign()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn add(&self, other: &Self, prec: u64, round: Round) -> Self {
        if self.mant.is_zero() {
            return Self::rounded(other.mant.clone(), other.exp, prec, round);
        }
        if other.mant.is_zero() {
            return Self::rounded(self.mant.clone(), self.exp, prec, round);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << ((self.exp - e) as u64);
        let b = &other.mant << ((other.exp - e) as u64);
        Self::rounded(a + b, e, prec, round)
    }

    pub fn mul(&self, other: &Self, prec: u64, round: Round) -> Self {
        Self::rounded(&self.mant * &other.mant, self.exp + other.exp, prec, round)
    }

    /// `1 / self`, rounded. Panics on zero.
    pub fn recip(&self, prec: u64, round: Round) -> Self {
        assert!(!self.mant.is_zero(), "reciprocal of zero");
        let s = prec + self.mant.bits() + 1;
        let q = div_round(&pow2(s), &self.mant, round);
        Self::rounded(q, -(s as i64) - self.exp, prec, round)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.min(other.exp);
        let a = &self.mant << ((self.exp - e) as u64);
        let b = &other.mant << ((other.exp - e) as u64);
        a.cmp(&b)
    }
}
