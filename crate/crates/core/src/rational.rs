//! Exact rationals and their lossless `"num/den"` text form.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Longest accepted textual rational. Keeps parsing of hostile input linear.
const MAX_LEN: usize = 4096;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`. Panics on a zero denominator; use [`checked_ratio`] for
/// untrusted values.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn checked_ratio(num: i64, den: i64) -> Result<Rational, Error> {
    if den == 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(ratio(num, den))
}

/// Exact division; a zero divisor is an error rather than a panic.
pub fn div(a: &Rational, b: &Rational) -> Result<Rational, Error> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Display adapter that always prints `num/den`, including integers (`2/1`).
pub struct Frac<'a>(pub &'a Rational);

impl fmt::Display for Frac<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

pub fn format(r: &Rational) -> String {
    Frac(r).to_string()
}

/// Parses `"num/den"` or a bare integer `"num"`. Non-reduced input is reduced.
pub fn parse(s: &str) -> Result<Rational, Error> {
    let bad = || Error::BadRational(truncate(s));
    if s.is_empty() || s.len() > MAX_LEN {
        return Err(bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num = parse_int(num).ok_or_else(bad)?;
    let den = parse_int(den).ok_or_else(bad)?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if den.is_negative() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn truncate(s: &str) -> String {
    s.chars().take(40).collect()
}

/// Serde adapter for `Rational` fields stored as `"num/den"` strings.
pub mod serde_frac {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}
