//! Exact cost arithmetic.
//!
//! Edge costs are rationals over `i128`; the LP oracle lifts them into
//! arbitrary precision ([`Q`]) because simplex pivots grow denominators.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use std::fmt;

/// Cost of an edge, component or tree.
pub type Cost = Ratio<i128>;

/// Arbitrary precision rational used by the LP machinery.
pub type Q = BigRational;

pub fn int(v: i128) -> Cost {
    Cost::from_integer(v)
}

pub fn to_q(c: &Cost) -> Q {
    Q::new(BigInt::from(*c.numer()), BigInt::from(*c.denom()))
}

/// Converts back from [`Q`]; `None` when the value does not fit in `i128`.
pub fn from_q(q: &Q) -> Option<Cost> {
    Some(Cost::new(q.numer().to_i128()?, q.denom().to_i128()?))
}

pub fn to_f64(c: &Cost) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct RationalParseError(pub String);

/// Parses an integer, decimal (`2.75`, `-0.5`, `3.`) or fraction (`7/4`) literal exactly.
pub fn parse_cost(s: &str) -> Result<Cost, RationalParseError> {
    let err = || RationalParseError(s.to_string());
    let s = s.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| err())?;
        let q: i128 = q.trim().parse().map_err(|_| err())?;
        if q == 0 {
            return Err(err());
        }
        return Ok(Cost::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    if frac.len() > 30 {
        return Err(err());
    }
    let digits = format!("{whole}{frac}");
    let numer: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| err())? };
    let denom = 10i128.checked_pow(frac.len() as u32).ok_or_else(err)?;
    let v = Cost::new(numer, denom);
    Ok(if neg { -v } else { v })
}

/// Serialized form used in reports: always `p/q`.
pub fn to_pq(c: &Cost) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

pub fn q_to_pq(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Compact form used in STP output: integers without a denominator.
pub fn to_literal(c: &Cost) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        to_pq(c)
    }
}

/// `exact (decimal)` rendering for human summaries.
pub struct Pretty<'a>(pub &'a Cost);

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{} ({:.6})", to_pq(self.0), to_f64(self.0))
        }
    }
}

/// Rounds `x` up to the next multiple of `10^-digits`, adding a few ulps first so that
/// floating error never rounds a bound below its true value.
pub fn round_up_decimal(x: f64, digits: u32) -> Cost {
    let scale = 10i128.pow(digits);
    let padded = x + x.abs() * 8.0 * f64::EPSILON + f64::MIN_POSITIVE;
    let scaled = (padded * scale as f64).ceil() as i128;
    Cost::new(scaled, scale)
}

/// Mirror of [`round_up_decimal`]: never above the true value.
pub fn round_down_decimal(x: f64, digits: u32) -> Cost {
    let scale = 10i128.pow(digits);
    let padded = x - x.abs() * 8.0 * f64::EPSILON - f64::MIN_POSITIVE;
    let scaled = (padded * scale as f64).floor() as i128;
    Cost::new(scaled, scale)
}

pub fn is_zero(c: &Cost) -> bool {
    c.is_zero()
}
