//! Exact arithmetic helpers. Every probability and value in the crate is a
//! `BigRational`; floats only appear in summaries meant for humans.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Accepts `a/b`, plain integers and finite decimals such as `-0.25`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((whole, frac)) = s.split_once('.') {
        if s.contains('/') || frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let r: Rational = s.parse().map_err(|_| bad())?;
    Ok(r)
}

/// `3/4`, `-1`, `0`.
pub fn show(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Six-place decimal rendering, exact rounding half away from zero.
pub fn decimal6(r: &Rational) -> String {
    let scale = BigInt::from(1_000_000);
    let scaled = (r * Rational::from_integer(scale.clone())).round().to_integer();
    let neg = scaled < BigInt::zero();
    let mag = if neg { -scaled } else { scaled };
    let (q, rem) = num_integer::Integer::div_rem(&mag, &scale);
    format!("{}{}.{:06}", if neg { "-" } else { "" }, q, rem.to_u64().unwrap_or(0))
}

/// Quantise a float to the nearest multiple of `1/denominator`.
pub fn quantise(x: f64, denominator: i64) -> Rational {
    let n = (x * denominator as f64).round() as i64;
    ratio(n, denominator)
}

pub(crate) fn ser<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&show(r))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Lit {
    Str(String),
    Int(i64),
}

pub(crate) fn de<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    match Lit::deserialize(d)? {
        Lit::Str(s) => parse(&s).map_err(serde::de::Error::custom),
        Lit::Int(n) => Ok(int(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse("-2").unwrap(), int(-2));
        assert_eq!(parse("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse("6/8").unwrap(), ratio(3, 4));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn renders() {
        assert_eq!(show(&ratio(6, 8)), "3/4");
        assert_eq!(show(&int(-3)), "-3");
        assert_eq!(decimal6(&ratio(2, 3)), "0.666667");
        assert_eq!(decimal6(&ratio(-1, 8)), "-0.125000");
        assert_eq!(decimal6(&int(0)), "0.000000");
    }
}
