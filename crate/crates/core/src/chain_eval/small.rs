//! Exact moment matrices in checked `i128` integers.
//!
//! Each factor of the product chain is written as an integer matrix over one
//! common denominator, so the products need no gcds at all; the accumulated
//! denominator is divided out once at the end. Most inputs are small
//! fractions and fit comfortably; any overflow abandons the attempt and the
//! caller falls back to arbitrary precision, so results are identical
//! either way.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::ensemble::{ChainSpec, CouplingKernel};
use crate::numerics::{Matrix, Rational};

/// An unreduced fraction.
#[derive(Clone, Copy)]
struct Frac(i128, i128);

impl Frac {
    const ONE: Frac = Frac(1, 1);

    fn of(r: &Rational) -> Option<Self> {
        Some(Frac(r.numer().to_i128()?, r.denom().to_i128()?))
    }

    fn mul(self, o: Frac) -> Option<Frac> {
        Some(Frac(self.0.checked_mul(o.0)?, self.1.checked_mul(o.1)?))
    }
}

/// `v / den`, row-major.
struct Block {
    rows: usize,
    cols: usize,
    v: Vec<i128>,
    den: i128,
}

impl Block {
    fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Option<Frac>) -> Option<Self> {
        let mut fr = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                fr.push(f(i, j)?);
            }
        }
        let mut den = 1i128;
        for q in &fr {
            if q.0 != 0 {
                den = den.checked_div(den.gcd(&q.1))?.checked_mul(q.1)?;
            }
        }
        let v = fr
            .iter()
            .map(|q| if q.0 == 0 { Some(0) } else { q.0.checked_mul(den / q.1) })
            .collect::<Option<Vec<_>>>()?;
        Some(Self { rows, cols, v, den })
    }

    fn matmul(&self, rhs: &Block) -> Option<Block> {
        debug_assert_eq!(self.cols, rhs.rows);
        let mut v = vec![0i128; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.v[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cell = &mut v[i * rhs.cols + j];
                    *cell = cell.checked_add(a.checked_mul(rhs.v[k * rhs.cols + j])?)?;
                }
            }
        }
        Some(Block { rows: self.rows, cols: rhs.cols, v, den: self.den.checked_mul(rhs.den)? })
    }
}

fn powers(x: Frac, d: usize) -> Option<Vec<Frac>> {
    let mut out = Vec::with_capacity(d + 1);
    out.push(Frac::ONE);
    for k in 0..d {
        out.push(out[k].mul(x)?);
    }
    Some(out)
}

/// `(x, y, w)` of every atom of `mu_alpha`.
fn atoms(c: &ChainSpec<Rational>, alpha: usize) -> Option<Vec<[Frac; 3]>> {
    c.measure(alpha).atoms().iter().map(|a| Some([Frac::of(&a.x)?, Frac::of(&a.y)?, Frac::of(&a.w)?])).collect()
}

/// The chained moment matrix, or `None` when an intermediate leaves `i128`.
pub(super) fn moment_matrix(c: &ChainSpec<Rational>) -> Option<Matrix<Rational>> {
    let n = c.n();
    let top = n.saturating_sub(1);
    let first = atoms(c, 1)?;
    let pw = first.iter().map(|a| powers(a[0], top)).collect::<Option<Vec<_>>>()?;
    let mut g = Block::from_fn(n, first.len(), |k, s| pw[s][top - k].mul(first[s][2]))?;
    let mut left = first;
    for alpha in 2..c.p() {
        let right = atoms(c, alpha)?;
        g = match c.kernel(alpha) {
            CouplingKernel::Polynomial(poly) => {
                let (dy, dx) = poly.degrees();
                let py = left.iter().map(|a| powers(a[1], dy)).collect::<Option<Vec<_>>>()?;
                let px = right.iter().map(|a| powers(a[0], dx)).collect::<Option<Vec<_>>>()?;
                let ly = Block::from_fn(left.len(), dy + 1, |s, e| Some(py[s][e]))?;
                let coeff = poly.coefficients();
                let cm = Block::from_fn(dy + 1, dx + 1, |i, j| Frac::of(&coeff[(i, j)]))?;
                let rx = Block::from_fn(dx + 1, right.len(), |e, t| px[t][e].mul(right[t][2]))?;
                g.matmul(&ly)?.matmul(&cm)?.matmul(&rx)?
            }
            CouplingKernel::Table(_) => {
                let k = c.kernel_matrix(alpha).ok()?;
                let weighted = Block::from_fn(k.rows(), k.cols(), |s, t| Frac::of(&k[(s, t)])?.mul(right[t][2]))?;
                g.matmul(&weighted)?
            }
        };
        left = right;
    }
    let pw = left.iter().map(|a| powers(a[1], top)).collect::<Option<Vec<_>>>()?;
    let y = Block::from_fn(left.len(), n, |s, l| Some(pw[s][top - l]))?;
    let g = g.matmul(&y)?;
    let den = BigInt::from(g.den);
    Matrix::new(g.rows, g.cols, g.v.iter().map(|&v| Rational::new(BigInt::from(v), den.clone())).collect()).ok()
}
