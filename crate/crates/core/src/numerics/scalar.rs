use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::Rational;
use crate::error::{Error, Mode, Result};

/// A value tagged with its arithmetic mode.
///
/// Exact values print as `num/den` (or a bare integer), float values print in
/// Rust's shortest round-trip form. Arithmetic between different modes is an
/// error.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Rational::zero()),
            Mode::Float => Scalar::Float(0.0),
        }
    }

    pub fn from_i64(v: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(v))),
            Mode::Float => Scalar::Float(v as f64),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(v) => *v,
        }
    }

    /// Parses `text` in the requested mode.
    ///
    /// Exact mode accepts integers and `num/den`; float mode additionally
    /// accepts any decimal or exponent form.
    pub fn parse(text: &str, mode: Mode) -> Result<Self> {
        let t = text.trim();
        match mode {
            Mode::Exact => parse_rational(t).map(Scalar::Exact),
            Mode::Float => {
                if let Ok(q) = parse_rational(t) {
                    return Ok(Scalar::Float(q.to_f64().unwrap_or(f64::NAN)));
                }
                t.parse::<f64>().map(Scalar::Float).map_err(|_| Error::Parse(format!("`{t}` is not a number")))
            }
        }
    }

    /// Converts to the other mode. Float to exact is only allowed for
    /// finite values and is exact in the binary expansion.
    pub fn to_mode(&self, mode: Mode) -> Result<Self> {
        match (self, mode) {
            (Scalar::Exact(_), Mode::Exact) | (Scalar::Float(_), Mode::Float) => Ok(self.clone()),
            (Scalar::Exact(q), Mode::Float) => Ok(Scalar::Float(q.to_f64().unwrap_or(f64::NAN))),
            (Scalar::Float(v), Mode::Exact) => BigRational::from_float(*v)
                .map(Scalar::Exact)
                .ok_or_else(|| Error::Parse(format!("{v} has no exact value"))),
        }
    }

    fn binary(
        &self,
        other: &Self,
        exact: impl FnOnce(&Rational, &Rational) -> Result<Rational>,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Result<Self> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => exact(a, b).map(Scalar::Exact),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(float(*a, *b))),
            (a, b) => Err(Error::ModeMismatch(a.mode(), b.mode())),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.binary(other, |a, b| Ok(a + b), |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.binary(other, |a, b| Ok(a - b), |a, b| a - b)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.binary(other, |a, b| Ok(a * b), |a, b| a * b)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.binary(
            other,
            |a, b| {
                if b.is_zero() {
                    Err(Error::Parse("division by zero".into()))
                } else {
                    Ok(a / b)
                }
            },
            |a, b| a / b,
        )
    }
}

fn parse_rational(t: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("`{t}` is not a rational number (expected n or n/d)"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("`{t}` has a zero denominator")));
            }
            Ok(BigRational::new(n, d))
        }
        None => BigInt::from_str(t).map(BigRational::from_integer).map_err(|_| bad()),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Float(v) => write!(f, "{v:?}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Deserializes a string or JSON number into a float-or-exact scalar: strings
/// and integers become exact, non-integral numbers become floats. Callers
/// convert with [`Scalar::to_mode`] once the run mode is known.
impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => {
                if let Ok(q) = parse_rational(&s) {
                    Ok(Scalar::Exact(q))
                } else {
                    s.trim()
                        .parse::<f64>()
                        .map(Scalar::Float)
                        .map_err(|_| serde::de::Error::custom(format!("`{s}` is not a number")))
                }
            }
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Scalar::Exact(BigRational::from_integer(i.into())))
                } else {
                    n.as_f64().map(Scalar::Float).ok_or_else(|| serde::de::Error::custom("unrepresentable number"))
                }
            }
            other => Err(serde::de::Error::custom(format!("expected a number or numeric string, found {other}"))),
        }
    }
}
