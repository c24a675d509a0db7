//! Numeric tower: exact/float scalars, determinants, Vandermonde evaluation
//! and Wick pairing combinatorics.

mod combinatorics;
mod field;
mod matrix;
mod scalar;

pub use combinatorics::{vandermonde, wick_det, wick_vev, PairingTable, WICK_CAP};

pub(crate) use combinatorics::{monomial, powers};
pub use field::{factorial, Field, Rational};
pub use matrix::Matrix;
pub use scalar::Scalar;
