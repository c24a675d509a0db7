use super::chain::ChainSpec;
use super::kernel::{CouplingKernel, KernelTable};
use super::measure::{Atom, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Discretized chain of `2p - 2` Hermitian matrices
/// `exp tr(sum V_k(M_k) + sum c_k M_k M_{k+1})`.
///
/// `potentials[k - 1]` holds the coefficients of `V_k` by ascending power,
/// `couplings[k - 1]` is `c_k` and `grids[k - 1]` the quadrature points for
/// the eigenvalues of `M_k`. Odd couplings sit in the measures, even ones in
/// the kernels; each potential is attached exactly once:
///
/// * `mu_alpha(x, y) = exp(c_{2a-1} x y)`, plus `V_1(x)` on `mu_1` and
///   `V_{2p-2}(y)` on `mu_{p-1}`;
/// * `rho_alpha(y, x) = exp(c_{2a-2} y x + V_{2a-2}(y) + V_{2a-1}(x))`.
pub fn hermitian_chain_preset(
    n: usize,
    potentials: &[Vec<f64>],
    couplings: &[f64],
    grids: &[Vec<f64>],
) -> Result<ChainSpec<f64>> {
    let k = grids.len();
    if k < 2 || k % 2 == 1 {
        return Err(Error::InvalidChain(format!("need an even number (>= 2) of grids, got {k}")));
    }
    let p = k / 2 + 1;
    if potentials.len() != k || couplings.len() != k - 1 {
        return Err(Error::InvalidChain(format!(
            "p = {p} needs {k} potentials and {} couplings, got {} and {}",
            k - 1,
            potentials.len(),
            couplings.len()
        )));
    }
    if let Some(i) = grids.iter().position(Vec::is_empty) {
        return Err(Error::InvalidChain(format!("grid {} is empty", i + 1)));
    }
    let v = |idx: usize, u: f64| -> f64 { potentials[idx - 1].iter().rev().fold(0.0, |acc, c| acc * u + c) };
    let c = |idx: usize| couplings[idx - 1];
    let grid = |idx: usize| &grids[idx - 1];

    let mut measures = Vec::with_capacity(p - 1);
    for a in 1..p {
        let mut atoms = Vec::new();
        for &x in grid(2 * a - 1) {
            for &y in grid(2 * a) {
                let mut e = c(2 * a - 1) * x * y;
                if a == 1 {
                    e += v(1, x);
                }
                if a == p - 1 {
                    e += v(2 * p - 2, y);
                }
                atoms.push(Atom::new(x, y, e.exp()));
            }
        }
        measures.push(DiscreteMeasure::new(a, atoms)?);
    }

    let mut kernels = Vec::with_capacity(p - 2);
    for a in 2..p {
        let ys = grid(2 * a - 2).clone();
        let xs = grid(2 * a - 1).clone();
        let values = Matrix::from_fn(ys.len(), xs.len(), |i, j| {
            let (y, x) = (ys[i], xs[j]);
            (c(2 * a - 2) * y * x + v(2 * a - 2, y) + v(2 * a - 1, x)).exp()
        });
        kernels.push(CouplingKernel::Table(KernelTable::new(ys, xs, values)?));
    }
    ChainSpec::new(p, n, measures, kernels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_examples() {
        let c = hermitian_chain_preset(1, &[vec![], vec![]], &[0.0], &[vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(c.measure(1).atoms(), &[Atom::new(1.0, 1.0, 1.0)]);

        let c = hermitian_chain_preset(1, &[vec![], vec![]], &[1.0], &[vec![1.0], vec![2.0]]).unwrap();
        assert!((c.measure(1).atoms()[0].w - 2f64.exp()).abs() < 1e-12);

        let zeros = vec![vec![0.0]; 4];
        let c = hermitian_chain_preset(1, &zeros, &[0.0; 3], &[vec![1.0], vec![2.0], vec![3.0], vec![4.0]]).unwrap();
        assert_eq!(c.p(), 3);
        assert_eq!(c.kernel_matrix(2).unwrap().data(), &[1.0]);
    }

    #[test]
    fn every_potential_enters_once() {
        // V_k(u) = k u, all couplings zero, singleton grids at u = 1:
        // the integrand is exp(1 + 2 + 3 + 4).
        let pots: Vec<Vec<f64>> = (1..=4).map(|k| vec![0.0, k as f64]).collect();
        let grids = vec![vec![1.0]; 4];
        let c = hermitian_chain_preset(1, &pots, &[0.0; 3], &grids).unwrap();
        let total = c.measure(1).atoms()[0].w * c.measure(2).atoms()[0].w * c.kernel_matrix(2).unwrap()[(0, 0)];
        assert!((total.ln() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn empty_grid_is_rejected() {
        assert!(hermitian_chain_preset(1, &[vec![], vec![]], &[0.0], &[vec![], vec![1.0]]).is_err());
    }
}
