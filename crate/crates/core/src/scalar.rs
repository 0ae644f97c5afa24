//! Exact rational scalars and their textual forms.
//!
//! Every coefficient in the crate is a [`Scalar`], an arbitrary precision
//! fraction kept in lowest terms with a positive denominator. The canonical
//! text form is `"num/den"` (denominator omitted when it is 1), which is what
//! [`std::fmt::Display`] on `BigRational` already produces.

use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseScalarError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.05"` or
/// `"-1.25e-1"`. Decimals are expanded exactly; no binary rounding happens.
pub fn parse_scalar(text: &str) -> Result<Scalar, ParseScalarError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseScalarError::Empty);
    }
    let invalid = || ParseScalarError::Invalid(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| invalid())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| invalid())?;
        if den.is_zero() {
            return Err(ParseScalarError::ZeroDenominator(s.to_string()));
        }
        return Ok(Scalar::new(num, den));
    }
    parse_decimal(s).ok_or_else(invalid)
}

fn parse_decimal(s: &str) -> Option<Scalar> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
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
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if all_digits.is_empty() { "0" } else { &all_digits }).ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Scalar::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Scalar::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Decimal rendering with exactly `digits` fractional digits, rounded half
/// away from zero. Computed in integer arithmetic, so `1/3` at 12 digits is
/// `0.333333333333` on every platform.
pub fn to_decimal(value: &Scalar, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = value.numer().abs() * &scale;
    let (q, rem) = scaled.div_rem(value.denom());
    let rounded = if rem * 2 >= *value.denom() { q + 1 } else { q };
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if value.is_negative() && !(int_part.is_zero() && frac_part.is_zero()) { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    let frac = frac_part.to_string();
    format!("{sign}{int_part}.{}{frac}", "0".repeat(digits - frac.len()))
}

pub fn to_f64(value: &Scalar) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents). Used to place irrational Bloch vectors
/// such as magic states into exact arithmetic.
pub fn approximate(x: f64, max_den: u64) -> Scalar {
    assert!(x.is_finite(), "cannot approximate a non-finite value");
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut frac = x;
    let max_den = BigInt::from(max_den);
    for _ in 0..64 {
        let a = frac.floor();
        let a_int = BigInt::from(a as i64);
        let h2 = &a_int * &h1 + &h0;
        let k2 = &a_int * &k1 + &k0;
        if k2 > max_den {
            break;
        }
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        let rest = frac - a;
        if rest.abs() < 1e-18 {
            break;
        }
        frac = 1.0 / rest;
    }
    Scalar::new(h1, k1)
}

/// Scales a probability in `[0, 1]` to a threshold on a uniform `u64` draw:
/// `ceil(p * 2^64)`, so `u < threshold` has probability within `2^-64` of `p`.
pub fn probability_threshold(p: &Scalar) -> u128 {
    use num_traits::ToPrimitive;
    debug_assert!(!p.is_negative() && *p <= Scalar::one());
    let scaled = p.numer() << 64usize;
    let (q, rem) = scaled.div_rem(p.denom());
    let ceil = if rem.is_zero() { q } else { q + 1 };
    match ceil.sign() {
        Sign::Minus => 0,
        _ => ceil.to_u128().unwrap_or(u128::MAX),
    }
}

/// Serde adapter writing a [`Scalar`] as its canonical string.
pub mod serde_scalar {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Scalar, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Scalar, D::Error> {
        let s = String::deserialize(de)?;
        parse_scalar(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a fixed-size array of scalars.
pub mod serde_scalar_array {
    use super::*;
    use serde::ser::SerializeTuple;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(values: &[Scalar; N], ser: S) -> Result<S::Ok, S::Error> {
        let mut tup = ser.serialize_tuple(N)?;
        for v in values {
            tup.serialize_element(&v.to_string())?;
        }
        tup.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(de: D) -> Result<[Scalar; N], D::Error> {
        let raw = Vec::<String>::deserialize(de)?;
        if raw.len() != N {
            return Err(serde::de::Error::invalid_length(raw.len(), &"fixed-size array"));
        }
        let parsed =
            raw.iter().map(|s| parse_scalar(s).map_err(serde::de::Error::custom)).collect::<Result<Vec<_>, _>>()?;
        Ok(parsed.try_into().unwrap_or_else(|_| unreachable!()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_strings() {
        assert_eq!(ratio(544, 978).to_string(), "272/489");
        assert_eq!(int(-1).to_string(), "-1");
        assert_eq!(int(0).to_string(), "0");
        assert_eq!(ratio(3, -6).to_string(), "-1/2");
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_scalar("272/489").unwrap(), ratio(272, 489));
        assert_eq!(parse_scalar("-4/8").unwrap(), ratio(-1, 2));
        assert_eq!(parse_scalar("0.05").unwrap(), ratio(1, 20));
        assert_eq!(parse_scalar("1").unwrap(), int(1));
        assert_eq!(parse_scalar("-.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse_scalar("2.5e-1").unwrap(), ratio(1, 4));
        assert!(matches!(parse_scalar("1/0"), Err(ParseScalarError::ZeroDenominator(_))));
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar(".").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&ratio(272, 489), 12), "0.556237218814");
        assert_eq!(to_decimal(&ratio(2, 3), 12), "0.666666666667");
        assert_eq!(to_decimal(&ratio(-1, 3), 4), "-0.3333");
        assert_eq!(to_decimal(&int(0), 3), "0.000");
        assert_eq!(to_decimal(&ratio(-1, 10_000), 2), "0.00");
        assert_eq!(to_decimal(&ratio(55, 978), 12), "0.056237218814");
    }

    #[test]
    fn approximation_is_close() {
        let x = 1.0 / 3f64.sqrt();
        let q = approximate(x, 1 << 40);
        assert!((to_f64(&q) - x).abs() < 1e-15);
        assert_eq!(approximate(0.5, 100), ratio(1, 2));
    }

    #[test]
    fn thresholds() {
        assert_eq!(probability_threshold(&int(0)), 0);
        assert_eq!(probability_threshold(&int(1)), 1u128 << 64);
        assert_eq!(probability_threshold(&ratio(1, 2)), 1u128 << 63);
        assert_eq!(probability_threshold(&ratio(1, 3)), (1u128 << 64) / 3 + 1);
    }
}
