//! Exact rational helpers and the JSON number representation.
//!
//! JSON numbers are read from their literal text, so `0.3` becomes exactly
//! `3/10`. Values with a terminating decimal expansion are written back as
//! JSON numbers; anything else is written as a `"p/q"` string, which the
//! reader accepts as well. Together this makes instance files round-trip
//! exactly.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Parses `"p/q"`, an integer, or a decimal literal with optional exponent.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| Error::Parse(format!("{text}: {e}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| Error::Parse(format!("{text}: {e}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("{text}: zero denominator")));
        }
        return Ok(BigRational::new(p, q));
    }
    parse_decimal(s).ok_or_else(|| Error::Parse(format!("not a number: {text:?}")))
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    if negative {
        numer = -numer;
    }
    let shift = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let value = if shift >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-shift) as usize))
    };
    Some(value)
}

/// Decimal text for `r` when its expansion terminates, otherwise `None`.
pub fn terminating_decimal(r: &BigRational) -> Option<String> {
    let mut q = r.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let (mut twos, mut fives) = (0usize, 0usize);
    while q.is_even() {
        q /= &two;
        twos += 1;
    }
    while (&q % &five).is_zero() {
        q /= &five;
        fives += 1;
    }
    if !q.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scale = num_traits::pow(BigInt::from(10u32), places) / r.denom();
    let scaled = r.numer() * scale;
    let negative = scaled.sign() == Sign::Minus;
    let digits = scaled.abs().to_string();
    let body = if places == 0 {
        digits
    } else if digits.len() > places {
        let (a, b) = digits.split_at(digits.len() - places);
        format!("{a}.{b}")
    } else {
        format!("0.{}{}", "0".repeat(places - digits.len()), digits)
    };
    Some(if negative { format!("-{body}") } else { body })
}

/// Human-readable form: terminating decimal or `p/q`.
pub fn format_rational(r: &BigRational) -> String {
    terminating_decimal(r).unwrap_or_else(|| format!("{}/{}", r.numer(), r.denom()))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float.
pub fn from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite value {x}")))
}

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn integer(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// `x^n` for a nonnegative exponent.
pub fn pow(x: &BigRational, n: usize) -> BigRational {
    num_traits::pow(x.clone(), n)
}

/// Exact rational that (de)serializes as a JSON number or a `"p/q"` string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub BigRational);

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.0))
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.0))
    }
}

impl From<BigRational> for Exact {
    fn from(r: BigRational) -> Self {
        Exact(r)
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match terminating_decimal(&self.0) {
            Some(text) => {
                let number =
                    serde_json::Number::from_str(&text).map_err(serde::ser::Error::custom)?;
                number.serialize(serializer)
            }
            None => serializer.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom())),
        }
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        let text = match &value {
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::String(s) => s.clone(),
            other => {
                return Err(serde::de::Error::custom(format!(
                    "expected number or \"p/q\" string, found {other}"
                )))
            }
        };
        parse_rational(&text)
            .map(Exact)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_rational("0.3").unwrap(), rational(3, 10));
        assert_eq!(parse_rational("-1.25e1").unwrap(), rational(-25, 2));
        assert_eq!(parse_rational("7").unwrap(), integer(7));
        assert_eq!(parse_rational("2/6").unwrap(), rational(1, 3));
        assert_eq!(parse_rational(".5").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("1E-3").unwrap(), rational(1, 1000));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn terminating_decimals() {
        assert_eq!(terminating_decimal(&rational(1, 8)).unwrap(), "0.125");
        assert_eq!(terminating_decimal(&rational(-3, 20)).unwrap(), "-0.15");
        assert_eq!(terminating_decimal(&integer(12)).unwrap(), "12");
        assert_eq!(terminating_decimal(&rational(1, 3)), None);
        assert_eq!(format_rational(&rational(2, 3)), "2/3");
    }

    #[test]
    fn json_round_trip() {
        for r in [rational(1, 3), rational(3, 10), integer(-4), rational(1, 1024)] {
            let text = serde_json::to_string(&Exact(r.clone())).unwrap();
            let back: Exact = serde_json::from_str(&text).unwrap();
            assert_eq!(back.0, r, "{text}");
        }
        assert_eq!(serde_json::to_string(&Exact(rational(3, 10))).unwrap(), "0.3");
        assert_eq!(serde_json::to_string(&Exact(rational(1, 3))).unwrap(), "\"1/3\"");
    }
}
