//! Exact rational arithmetic helpers.
//!
//! All probabilities, rewards, LP coefficients and chain quantities in this
//! crate are arbitrary-precision rationals ([`Q`]), kept in lowest terms by
//! the underlying representation. Nothing is ever rounded.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Arbitrary-precision rational number.
pub type Q = num_rational::BigRational;

/// Shorthand for a rational from an integer pair.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer rational.
pub fn qi(num: i64) -> Q {
    Q::from_integer(BigInt::from(num))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, an integer, or a decimal (optionally with an exponent)
/// into an exact rational. Decimals convert exactly: `"0.25"` becomes `1/4`.
pub fn parse_rational(text: &str) -> Result<Q, ParseRationalError> {
    let s = text.trim();
    let err = || ParseRationalError(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    // [sign] digits [. digits] [e [sign] digits]
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, i64::from_str(e).map_err(|_| err())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits: String = [int_part, frac_part].concat();
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(err());
    }
    let n = BigInt::from_str(&digits).map_err(|_| err())?;
    let scale = frac_part.len() as i64 - exp;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Q::new(n, ten.pow(scale as u32))
    } else {
        Q::from_integer(n * ten.pow((-scale) as u32))
    };
    Ok(value)
}

/// Canonical text form: the integer itself when the denominator is 1,
/// otherwise `"p/q"` in lowest terms.
pub fn format_rational(value: &Q) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Lossy conversion for statistics and display; never used in decisions.
pub fn to_f64(value: &Q) -> f64 {
    let digits = 15u32;
    let scale = BigInt::from(10).pow(digits);
    let scaled = (value * Q::from_integer(scale.clone())).round();
    let n = scaled.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let d = scale.to_string().parse::<f64>().unwrap_or(f64::NAN);
    n / d
}

/// Rational wrapper serialized as its canonical string form.
///
/// Used in every JSON-facing structure so that files and reports carry exact
/// values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rat(pub Q);

impl From<Q> for Rat {
    fn from(q: Q) -> Self {
        Rat(q)
    }
}

impl From<Rat> for Q {
    fn from(r: Rat) -> Self {
        r.0
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rational(&text)
            .map(Rat)
            .map_err(serde::de::Error::custom)
    }
}

/// True when `value` lies in the closed unit interval.
pub fn in_unit_interval(value: &Q) -> bool {
    !value.is_negative() && *value <= Q::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_rational("2/4").unwrap(), q(1, 2));
        assert_eq!(parse_rational("1").unwrap(), qi(1));
        assert_eq!(parse_rational("-3").unwrap(), qi(-3));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("2.5e-1").unwrap(), q(1, 4));
        assert_eq!(parse_rational("1e2").unwrap(), qi(100));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "x", "1/0", "1//2", "1.2.3", "--4"] {
            assert!(parse_rational(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&q(2, 4)), "1/2");
        assert_eq!(format_rational(&qi(7)), "7");
        assert_eq!(format_rational(&q(-1, 3)), "-1/3");
    }

    #[test]
    fn roundtrips_through_text() {
        for v in [q(3, 7), qi(0), q(-22, 6)] {
            assert_eq!(parse_rational(&format_rational(&v)).unwrap(), v);
        }
    }
}
