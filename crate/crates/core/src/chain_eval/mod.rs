//! Partition functions of atomic chains: direct enumeration, its
//! desymmetrized form, and the chained moment determinant.

mod enumerate;
mod small;

use std::any::Any;

pub use enumerate::MAX_BLOCKS;

use enumerate::{blocks, Factors};

use crate::ensemble::{ChainSpec, ClosedChainSpec, CouplingKernel, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::numerics::{factorial, powers, vandermonde, Field, Matrix, Rational};

/// `Z_N` by summing the integrand over every ordered assignment of atoms:
/// `Delta_N(x^(1)) prod_alpha det rho_alpha(y^(alpha)_i, x^(alpha)_j)
/// Delta_N(y^(p)) prod w`.
pub fn z_bruteforce<F: Field>(c: &ChainSpec<F>) -> Result<F> {
    enumerate_open(
        c,
        |k, rows, cols| Matrix::from_fn(rows.len(), cols.len(), |i, j| k[(rows[i], cols[j])].clone()).det(),
        F::one(),
    )
}

/// The same sum with each kernel determinant replaced by its diagonal
/// product `prod_i rho_alpha(y_i, x_i)`.
///
/// Every permutation in a determinant expansion can be absorbed by
/// relabelling the next measure's block, which flips the downstream
/// Vandermonde by the same sign, so the diagonal form is exact up to the
/// factor `(N!)^{p-2}`.
pub fn z_bruteforce_desym<F: Field>(c: &ChainSpec<F>) -> Result<F> {
    let scale = factorial(c.n()).pow(c.p().saturating_sub(2) as u32);
    enumerate_open(
        c,
        |k, rows, cols| Ok(rows.iter().zip(cols).fold(F::one(), |acc, (&s, &t)| acc * &k[(s, t)])),
        F::from_bigint(&scale),
    )
}

fn enumerate_open<F: Field>(
    c: &ChainSpec<F>,
    link: impl Fn(&Matrix<F>, &[usize], &[usize]) -> Result<F>,
    scale: F,
) -> Result<F> {
    let n = c.n();
    if n == 0 {
        return Ok(F::one());
    }
    let last = c.p() - 1;
    let per_measure: Vec<Vec<Vec<usize>>> = c.measures().iter().map(|m| blocks(m.len(), n)).collect::<Result<_>>()?;

    let mut nodes = Vec::with_capacity(last);
    for (a, (m, bl)) in c.measures().iter().zip(&per_measure).enumerate() {
        let alpha = a + 1;
        let mut row = Vec::with_capacity(bl.len());
        for b in bl {
            let mut v = weight_product(m, b);
            if !v.is_zero() && alpha == 1 {
                let xs: Vec<F> = b.iter().map(|&s| m.atoms()[s].x.clone()).collect();
                v = v * &vandermonde(&xs, n as i64)?;
            }
            if !v.is_zero() && alpha == last {
                let ys: Vec<F> = b.iter().map(|&s| m.atoms()[s].y.clone()).collect();
                v = v * &vandermonde(&ys, n as i64)?;
            }
            row.push(v);
        }
        nodes.push(row);
    }

    let mut edges = Vec::with_capacity(last.saturating_sub(1));
    for alpha in 2..=last {
        let k = c.kernel_matrix(alpha)?;
        let (left, right) = (&per_measure[alpha - 2], &per_measure[alpha - 1]);
        let mut e = Matrix::zeros(left.len(), right.len());
        for (i, bl) in left.iter().enumerate() {
            if nodes[alpha - 2][i].is_zero() {
                continue;
            }
            for (j, br) in right.iter().enumerate() {
                e[(i, j)] = link(&k, bl, br)?;
            }
        }
        edges.push(e);
    }

    let z = Factors { nodes, edges, closing: None }.sum() * &scale;
    finite(z, "z_bruteforce")
}

/// Closed-chain `Z_N` by enumeration: a product of `p` kernel determinants
/// with no Vandermonde endpoints.
pub fn z_loop_bruteforce<F: Field>(c: &ClosedChainSpec<F>) -> Result<F> {
    let n = c.n();
    if n == 0 {
        return Ok(F::one());
    }
    let p = c.p();
    let per_measure: Vec<Vec<Vec<usize>>> = c.measures().iter().map(|m| blocks(m.len(), n)).collect::<Result<_>>()?;
    let nodes: Vec<Vec<F>> = c
        .measures()
        .iter()
        .zip(&per_measure)
        .map(|(m, bl)| bl.iter().map(|b| weight_product(m, b)).collect())
        .collect();
    let pair = |alpha: usize| -> Result<Matrix<F>> {
        let left = if alpha == 1 { p } else { alpha - 1 };
        let k = c.kernel_matrix(alpha)?;
        let (lb, rb) = (&per_measure[left - 1], &per_measure[alpha - 1]);
        let mut e = Matrix::zeros(lb.len(), rb.len());
        for (i, bl) in lb.iter().enumerate() {
            for (j, br) in rb.iter().enumerate() {
                e[(i, j)] = Matrix::from_fn(n, n, |r, s| k[(bl[r], br[s])].clone()).det()?;
            }
        }
        Ok(e)
    };
    let edges = (2..=p).map(pair).collect::<Result<Vec<_>>>()?;
    let closing = pair(1)?;
    let z = Factors { nodes, edges, closing: Some(closing) }.sum();
    finite(z, "z_loop_bruteforce")
}

fn weight_product<F: Field>(m: &DiscreteMeasure<F>, block: &[usize]) -> F {
    block.iter().fold(F::one(), |acc, &s| acc * &m.atoms()[s].w)
}

fn finite<F: Field>(z: F, what: &str) -> Result<F> {
    if z.is_finite() {
        Ok(z)
    } else {
        Err(Error::FloatOverflow(what.into()))
    }
}

/// `G = X K_2 D_2 ... K_{p-1} D_{p-1} Y` with `X[k][s] = x_s^{N-1-k} w_s` on
/// `mu_1`, kernel tables `K_alpha`, diagonal weights `D_alpha` and
/// `Y[s][l] = y_s^{N-1-l}` on `mu_{p-1}`.
///
/// A polynomial kernel enters as `Py C Px^T`, powers of the left `y`s, its
/// coefficient matrix and powers of the right `x`s, so the product never
/// forms the full atom-by-atom table.
///
/// Exact chains whose moments fit in 128-bit integers take a gcd-free
/// integer path first.
pub fn chained_moment_matrix<F: Field>(c: &ChainSpec<F>) -> Result<Matrix<F>> {
    if let Some(exact) = (c as &dyn Any).downcast_ref::<ChainSpec<Rational>>() {
        if let Some(g) = small::moment_matrix(exact) {
            let g: Box<dyn Any> = Box::new(g);
            return Ok(*g.downcast::<Matrix<F>>().expect("F is Rational here"));
        }
    }
    general_moment_matrix(c)
}

fn general_moment_matrix<F: Field>(c: &ChainSpec<F>) -> Result<Matrix<F>> {
    let n = c.n();
    let top = n.saturating_sub(1);
    let first = c.measure(1);
    let pw: Vec<Vec<F>> = first.atoms().iter().map(|a| powers(&a.x, top)).collect();
    let mut g = Matrix::from_fn(n, first.len(), |k, s| pw[s][top - k].clone() * &first.atoms()[s].w);
    for alpha in 2..c.p() {
        let (left, m) = (c.measure(alpha - 1), c.measure(alpha));
        g = match c.kernel(alpha) {
            CouplingKernel::Polynomial(poly) => {
                let (dy, dx) = poly.degrees();
                let py: Vec<Vec<F>> = left.atoms().iter().map(|a| powers(&a.y, dy)).collect();
                let px: Vec<Vec<F>> = m.atoms().iter().map(|a| powers(&a.x, dx)).collect();
                let ly = Matrix::from_fn(left.len(), dy + 1, |s, e| py[s][e].clone());
                let rx = Matrix::from_fn(dx + 1, m.len(), |e, t| px[t][e].clone() * &m.atoms()[t].w);
                g.matmul(&ly)?.matmul(&poly.coefficients())?.matmul(&rx)?
            }
            CouplingKernel::Table(_) => {
                let k = c.kernel_matrix(alpha)?;
                let weighted = Matrix::from_fn(k.rows(), k.cols(), |s, t| k[(s, t)].clone() * &m.atoms()[t].w);
                g.matmul(&weighted)?
            }
        };
    }
    let last = c.measure(c.p() - 1);
    let pw: Vec<Vec<F>> = last.atoms().iter().map(|a| powers(&a.y, top)).collect();
    let y = Matrix::from_fn(last.len(), n, |s, l| pw[s][top - l].clone());
    g.matmul(&y)
}

/// `Z_N = (N!)^{p-1} det G`.
pub fn z_det<F: Field>(c: &ChainSpec<F>) -> Result<F> {
    if c.n() == 0 {
        return Ok(F::one());
    }
    let g = chained_moment_matrix(c)?;
    let scale = F::from_bigint(&factorial(c.n()).pow((c.p() - 1) as u32));
    finite(scale * &g.det()?, "z_det")
}
