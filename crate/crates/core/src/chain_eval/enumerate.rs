//! Sum over assignment tuples, one N-block of atom indices per measure.
//!
//! The integrand factors into per-block terms (Vandermondes, weight products)
//! and terms on adjacent block pairs (kernel determinants or diagonal
//! products). Both are tabulated once; the sum itself still visits every
//! tuple, skipping subtrees whose partial product is zero.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{Field, Matrix};

/// Enumerations beyond this many blocks per measure are refused.
pub const MAX_BLOCKS: usize = 1 << 16;

/// Ordered `n`-tuples over `atoms` indices, lexicographic.
pub(crate) fn blocks(atoms: usize, n: usize) -> Result<Vec<Vec<usize>>> {
    let count = (atoms as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > MAX_BLOCKS as u128 {
        return Err(Error::Dimension(format!(
            "{atoms}^{n} blocks per measure exceed the enumeration limit of {MAX_BLOCKS}"
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < atoms {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Tabulated integrand for a path (or cycle) of measures.
pub(crate) struct Factors<F> {
    /// `nodes[a][b]`: everything depending on block `b` of measure `a` alone.
    pub nodes: Vec<Vec<F>>,
    /// `edges[a][(b, c)]`: coupling of block `b` of measure `a` to block `c`
    /// of measure `a + 1`.
    pub edges: Vec<Matrix<F>>,
    /// Coupling of the last measure back to the first, for closed chains.
    pub closing: Option<Matrix<F>>,
}

impl<F: Field> Factors<F> {
    pub fn sum(&self) -> F {
        if self.nodes.is_empty() {
            return F::one();
        }
        let first = &self.nodes[0];
        let partial: Vec<F> = (0..first.len())
            .into_par_iter()
            .map(|b| if first[b].is_zero() { F::zero() } else { self.descend(1, b, b, first[b].clone()) })
            .collect();
        // ordered reduction keeps float results reproducible
        partial.into_iter().fold(F::zero(), |acc, v| acc + v)
    }

    fn descend(&self, level: usize, start: usize, prev: usize, acc: F) -> F {
        if level == self.nodes.len() {
            return match &self.closing {
                Some(c) => acc * &c[(prev, start)],
                None => acc,
            };
        }
        let edge = &self.edges[level - 1];
        let mut total = F::zero();
        for (b, node) in self.nodes[level].iter().enumerate() {
            let e = &edge[(prev, b)];
            if node.is_zero() || e.is_zero() {
                continue;
            }
            let next = acc.clone() * e * node;
            total = total + self.descend(level + 1, start, b, next);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_listing() {
        assert_eq!(blocks(2, 2).unwrap(), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(blocks(3, 0).unwrap(), vec![Vec::<usize>::new()]);
        assert!(blocks(300, 3).is_err());
    }

    #[test]
    fn path_and_cycle_sums() {
        let f = Factors {
            nodes: vec![vec![1.0, 2.0], vec![3.0, 5.0]],
            edges: vec![Matrix::from_rows(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap()],
            closing: None,
        };
        // 1*1*3 + 2*(3 + 5)
        assert_eq!(f.sum(), 19.0);
        let g = Factors { closing: Some(Matrix::from_rows(vec![vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap()), ..f };
        // 1*3*2 + 2*3*0 + 2*5*1
        assert_eq!(g.sum(), 16.0);
    }
}
