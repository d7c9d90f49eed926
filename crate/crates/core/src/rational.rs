//! Exact rational helpers shared by every module.
//!
//! Persisted artifacts never carry floating point: a rational is written as
//! `{"num": "<digits>", "den": "<digits>"}` with both parts as decimal strings,
//! so arbitrarily large values survive a round trip.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// `num / den` as a reduced big rational. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_u64(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Fractional part `x - floor(x)`, always in `[0, 1)`.
pub fn fract(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Parses `"1/3"`, `"0.05"`, `"2"` or `"-7/4"` into an exact rational.
pub fn parse(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::InvalidRational(text.to_string());
    if let Some((n, d)) = text.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = BigRational::new(num, den);
    Ok(if negative { -value } else { value })
}

/// Parses a comma separated list such as `"0.1,0.05,1/100"`.
pub fn parse_list(text: &str) -> Result<Vec<BigRational>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse)
        .collect()
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Requires `0 < x < 1`.
pub fn check_unit_open(name: &str, x: &BigRational) -> Result<()> {
    if x.is_positive() && x < &BigRational::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {x}")))
    }
}

/// Splits a nonnegative rational into `(numerator, denominator)` as `u128`
/// when both fit.
pub fn to_u128_pair(x: &BigRational) -> Option<(u128, u128)> {
    if x.is_negative() {
        return None;
    }
    Some((x.numer().to_u128()?, x.denom().to_u128()?))
}

/// Compares `a/b >= c/d` for nonnegative fractions with positive denominators.
pub fn frac_ge(a: u128, b: u128, c: u128, d: u128) -> bool {
    match (a.checked_mul(d), c.checked_mul(b)) {
        (Some(l), Some(r)) => l >= r,
        _ => BigUint::from(a) * BigUint::from(d) >= BigUint::from(c) * BigUint::from(b),
    }
}

/// Wire form of a rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for RationalRepr {
    fn from(x: &BigRational) -> Self {
        RationalRepr { num: x.numer().to_string(), den: x.denom().to_string() }
    }
}

impl TryFrom<&RationalRepr> for BigRational {
    type Error = Error;

    fn try_from(r: &RationalRepr) -> Result<Self> {
        let bad = || Error::InvalidRational(format!("{}/{}", r.num, r.den));
        let n = BigInt::from_str(&r.num).map_err(|_| bad())?;
        let d = BigInt::from_str(&r.den).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    }
}

pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Rational", 2)?;
    st.serialize_field("num", &x.numer().to_string())?;
    st.serialize_field("den", &x.denom().to_string())?;
    st.end()
}

pub fn serialize_opt<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => serialize(x, s),
        None => s.serialize_none(),
    }
}

pub fn serialize_vec<S: Serializer>(xs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&RationalRepr::from(x))?;
    }
    seq.end()
}

/// `gcd`-reduced `u64` fraction, handy where a full big rational is overkill.
pub fn reduced(num: u64, den: u64) -> (u64, u64) {
    let g = num.gcd(&den).max(1);
    (num / g, den / g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse("0.05").unwrap(), ratio(1, 20));
        assert_eq!(parse("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse("-7/4").unwrap(), ratio(-7, 4));
        assert_eq!(parse("2").unwrap(), ratio(2, 1));
        assert_eq!(parse(".5").unwrap(), ratio(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn fract_is_in_unit_interval() {
        assert_eq!(fract(&ratio(7, 3)), ratio(1, 3));
        assert_eq!(fract(&ratio(-1, 3)), ratio(2, 3));
        assert_eq!(fract(&ratio(4, 2)), ratio(0, 1));
    }

    #[test]
    fn repr_round_trip() {
        let x = ratio(-22, 7);
        let repr = RationalRepr::from(&x);
        assert_eq!(BigRational::try_from(&repr).unwrap(), x);
        let json = serde_json::to_string(&repr).unwrap();
        assert_eq!(json, r#"{"num":"-22","den":"7"}"#);
    }

    #[test]
    fn fraction_comparison_survives_overflow() {
        assert!(frac_ge(u128::MAX, 3, u128::MAX, 4));
        assert!(!frac_ge(1, 3, 1, 2));
        assert!(frac_ge(1, 2, 1, 2));
    }
}
