//! Vandermonde determinants and Wick pairing sums.

use super::field::Field;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Largest word length the Wick enumeration accepts (10395 matchings).
pub const WICK_CAP: usize = 12;

/// `det(x_i^{N-k})_{i,k=1..N}`; one for `N = 0`, zero for `N < 0`.
///
/// This is the sign convention used throughout the crate. It differs from
/// `prod_{i>j}(x_i - x_j)` by `(-1)^{N(N-1)/2}`.
pub fn vandermonde<F: Field>(xs: &[F], n: i64) -> Result<F> {
    if n < 0 {
        return Ok(F::zero());
    }
    let n = n as usize;
    if n == 0 {
        return Ok(F::one());
    }
    if xs.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: xs.len() });
    }
    let m = Matrix::from_fn(n, n, |i, k| monomial(&xs[i], n - 1 - k));
    m.det()
}

pub(crate) fn monomial<F: Field>(x: &F, e: usize) -> F {
    match e {
        0 => F::one(),
        _ => (1..e).fold(x.clone(), |acc, _| acc * x),
    }
}

/// `[1, x, x^2, ..., x^d]`.
pub(crate) fn powers<F: Field>(x: &F, d: usize) -> Vec<F> {
    let mut out = Vec::with_capacity(d + 1);
    out.push(F::one());
    for k in 0..d {
        let next = out[k].clone() * x;
        out.push(next);
    }
    out
}

/// Two-point values `<w_i w_j>` for `i < j` over a word of `len` letters.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingTable<F> {
    len: usize,
    values: Vec<F>,
}

impl<F: Field> PairingTable<F> {
    pub fn new(len: usize) -> Self {
        Self { len, values: vec![F::zero(); len * len.saturating_sub(1) / 2] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn slot(&self, i: usize, j: usize) -> Result<usize> {
        if i >= j || j >= self.len {
            return Err(Error::Dimension(format!("pairing ({i}, {j}) is not an ordered pair below {}", self.len)));
        }
        // row-major upper triangle
        Ok(i * (2 * self.len - i - 1) / 2 + (j - i - 1))
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) -> Result<()> {
        let k = self.slot(i, j)?;
        self.values[k] = v;
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> Result<&F> {
        self.slot(i, j).map(|k| &self.values[k])
    }

    /// Builds the table from a closure over ordered pairs.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut t = Self::new(len);
        for i in 0..len {
            for j in i + 1..len {
                let k = t.slot(i, j).expect("ordered pair");
                t.values[k] = f(i, j);
            }
        }
        t
    }
}

/// Vacuum expectation of a word by Wick's theorem: the signed sum over
/// perfect matchings of products of two-point values. Odd words vanish.
pub fn wick_vev<F: Field>(table: &PairingTable<F>) -> Result<F> {
    if table.len() % 2 == 1 {
        return Ok(F::zero());
    }
    if table.len() > WICK_CAP {
        return Err(Error::WickTooLong { len: table.len(), cap: WICK_CAP });
    }
    let letters: Vec<usize> = (0..table.len()).collect();
    matchings(table, &letters)
}

fn matchings<F: Field>(table: &PairingTable<F>, rest: &[usize]) -> Result<F> {
    if rest.is_empty() {
        return Ok(F::one());
    }
    let first = rest[0];
    let mut total = F::zero();
    for k in 1..rest.len() {
        let pair = table.get(first, rest[k])?;
        if pair.is_zero() {
            continue;
        }
        let remaining: Vec<usize> = rest[1..k].iter().chain(&rest[k + 1..]).copied().collect();
        let sub = matchings(table, &remaining)?;
        // moving rest[k] next to rest[0] crosses k - 1 letters
        let term = pair.clone() * &sub;
        total = if k % 2 == 1 { total + term } else { total - term };
    }
    Ok(total)
}

/// `<0| w_1 ... w_N wbar_N ... wbar_1 |0> = det <w_i wbar_j>` for words whose
/// first half is built from creation-type letters only and second half from
/// annihilation-type letters only.
pub fn wick_det<F: Field>(cross: &Matrix<F>) -> Result<F> {
    cross.det()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::field::Rational;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn r(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    #[test]
    fn vandermonde_conventions() {
        assert_eq!(vandermonde::<Rational>(&[], 0).unwrap(), r(1));
        assert_eq!(vandermonde(&[r(1), r(2)], -2).unwrap(), r(0));
        assert_eq!(vandermonde(&[r(3), r(1)], 2).unwrap(), r(2));
        assert_eq!(vandermonde(&[r(5)], 1).unwrap(), r(1));
        assert!(matches!(vandermonde(&[r(5)], 2), Err(Error::LengthMismatch { expected: 2, got: 1 })));
    }

    /// `prod_{i<j}(x_i - x_j)`, the product form matching the determinant
    /// convention.
    fn product_form(xs: &[Rational]) -> Rational {
        let mut acc = r(1);
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                acc *= xs[i].clone() - &xs[j];
            }
        }
        acc
    }

    proptest! {
        #[test]
        fn vandermonde_is_pairwise_product(xs in proptest::collection::vec((-6i64..7, 1i64..4), 1..6)) {
            let xs: Vec<Rational> = xs.into_iter().map(|(n, d)| BigRational::new(n.into(), d.into())).collect();
            prop_assert_eq!(vandermonde(&xs, xs.len() as i64).unwrap(), product_form(&xs));
        }

        #[test]
        fn wick_reduces_to_determinant(n in 1usize..5, vals in proptest::collection::vec((-5i64..6, 1i64..4), 16)) {
            // word: w_1..w_n followed by wbar_n..wbar_1; same-type contractions vanish
            let cross = Matrix::from_fn(n, n, |i, j| {
                let (a, b) = vals[i * 4 + j];
                BigRational::new(a.into(), b.into())
            });
            let table = PairingTable::from_fn(2 * n, |a, b| {
                if a < n && b >= n {
                    cross[(a, 2 * n - 1 - b)].clone()
                } else {
                    r(0)
                }
            });
            prop_assert_eq!(wick_vev(&table).unwrap(), wick_det(&cross).unwrap());
        }
    }

    #[test]
    fn wick_examples() {
        assert_eq!(wick_vev(&PairingTable::<Rational>::new(0)).unwrap(), r(1));
        let mut odd = PairingTable::new(3);
        odd.set(0, 1, r(4)).unwrap();
        assert_eq!(wick_vev(&odd).unwrap(), r(0));

        // <13> = a, <14> = b, <23> = c, <24> = d; <12> = <34> = 0.
        // Matching (13)(24) is an odd permutation, (14)(23) an even one.
        let (a, b, c, d) = (r(2), r(3), r(5), r(7));
        let mut t = PairingTable::new(4);
        t.set(0, 2, a.clone()).unwrap();
        t.set(0, 3, b.clone()).unwrap();
        t.set(1, 2, c.clone()).unwrap();
        t.set(1, 3, d.clone()).unwrap();
        assert_eq!(wick_vev(&t).unwrap(), b * c - a * d);
    }

    #[test]
    fn wick_det_examples() {
        let one = Matrix::from_rows(vec![vec![r(9)]]).unwrap();
        assert_eq!(wick_det(&one).unwrap(), r(9));
        let two = Matrix::from_rows(vec![vec![r(2), r(3)], vec![r(5), r(7)]]).unwrap();
        assert_eq!(wick_det(&two).unwrap(), r(2 * 7 - 3 * 5));
        let rep =
            Matrix::from_rows(vec![vec![r(1), r(2), r(3)], vec![r(4), r(5), r(6)], vec![r(1), r(2), r(3)]]).unwrap();
        assert_eq!(wick_det(&rep).unwrap(), r(0));
    }

    #[test]
    fn wick_cap_enforced() {
        let t = PairingTable::<Rational>::new(14);
        assert_eq!(wick_vev(&t), Err(Error::WickTooLong { len: 14, cap: 12 }));
        let t12 = PairingTable::from_fn(12, |_, _| r(1));
        assert!(wick_vev(&t12).is_ok());
    }

    #[test]
    fn table_rejects_unordered_pairs() {
        let mut t = PairingTable::<Rational>::new(4);
        assert!(t.set(2, 1, r(1)).is_err());
        assert!(t.get(0, 4).is_err());
    }
}
