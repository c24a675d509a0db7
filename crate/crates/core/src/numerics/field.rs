//! The arithmetic tower shared by every route.
//!
//! All algorithms are generic over [`Field`]. Two implementations exist:
//! [`Rational`] (exact, arbitrary precision) and `f64` (float mode).

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::Matrix;
use super::scalar::Scalar;
use crate::error::{Error, Mode, Result};

pub type Rational = BigRational;

pub trait Field:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    /// Exact binary value of a finite float (NaN and infinities map to zero
    /// in exact mode).
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    /// `e^self`; exact mode rejects it.
    fn exp(&self) -> Result<Self>;

    /// Determinant of a square matrix. Callers check squareness.
    fn determinant(m: &Matrix<Self>) -> Self;

    fn to_scalar(&self) -> Scalar;
    fn from_scalar(s: &Scalar) -> Result<Self>;

    fn is_finite(&self) -> bool {
        true
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Integer power; negative exponents need a nonzero base.
    fn pow_int(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * &b;
            }
            k >>= 1;
            if k > 0 {
                b = b.clone() * &b;
            }
        }
        Some(acc)
    }
}

impl Field for Rational {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(<Rational as Zero>::zero)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn exp(&self) -> Result<Self> {
        Err(Error::ExactTranscendental("exp"))
    }
    fn determinant(m: &Matrix<Self>) -> Self {
        bareiss_rational(m)
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Exact(self.clone())
    }
    fn from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Exact(q) => Ok(q.clone()),
            Scalar::Float(_) => Err(Error::ModeMismatch(Mode::Float, Mode::Exact)),
        }
    }
}

impl Field for f64 {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_bigint(v: &BigInt) -> Self {
        ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY)
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn exp(&self) -> Result<Self> {
        Ok(f64::exp(*self))
    }
    fn determinant(m: &Matrix<Self>) -> Self {
        pivoted_det(m)
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Float(*self)
    }
    fn from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Float(v) => Ok(*v),
            Scalar::Exact(_) => Err(Error::ModeMismatch(Mode::Exact, Mode::Float)),
        }
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// Fraction-free (Bareiss) elimination after clearing row denominators.
///
/// Every intermediate division is exact over the integers, so entry size
/// grows linearly with the elimination step rather than geometrically.
fn bareiss_rational(m: &Matrix<Rational>) -> Rational {
    let n = m.rows();
    if n == 0 {
        return <Rational as One>::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let row = m.row(i);
        let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        a.push(row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect());
        scale *= lcm;
    }

    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return <Rational as Zero>::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let mut det = a[n - 1][n - 1].clone();
    if negate {
        det = -det;
    }
    if scale.is_negative() {
        det = -det;
        scale = -scale;
    }
    BigRational::new(det, scale)
}

/// Gaussian elimination with partial pivoting.
fn pivoted_det(m: &Matrix<f64>) -> f64 {
    let n = m.rows();
    let mut a: Vec<f64> = m.data().to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let (piv, big) =
            (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if big == 0.0 {
            return 0.0;
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = a[k * n + k];
        det *= d;
        for i in k + 1..n {
            let factor = a[i * n + k] / d;
            if factor != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= factor * a[k * n + j];
                }
            }
        }
    }
    det
}

/// `n!` as an exact integer.
pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}
