use super::kernel::CouplingKernel;
use super::measure::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::numerics::{Field, Matrix};

/// An open chain: `p - 1` measures joined by the kernels `rho_2..rho_{p-1}`,
/// with Vandermonde endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec<F> {
    p: usize,
    n: usize,
    measures: Vec<DiscreteMeasure<F>>,
    kernels: Vec<CouplingKernel<F>>,
}

impl<F: Field> ChainSpec<F> {
    /// `kernels[i]` is `rho_{i+2}`; it couples the `y` of measure `i + 1`
    /// with the `x` of measure `i + 2` (both one-based).
    pub fn new(p: usize, n: usize, measures: Vec<DiscreteMeasure<F>>, kernels: Vec<CouplingKernel<F>>) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidChain(format!("p = {p}, need p >= 2")));
        }
        if measures.len() != p - 1 {
            return Err(Error::InvalidChain(format!("p = {p} needs {} measures, got {}", p - 1, measures.len())));
        }
        if kernels.len() != p - 2 {
            return Err(Error::InvalidChain(format!("p = {p} needs {} kernels, got {}", p - 2, kernels.len())));
        }
        let measures = measures.into_iter().enumerate().map(|(i, m)| m.with_label(i + 1)).collect();
        Ok(Self { p, n, measures, kernels })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn measures(&self) -> &[DiscreteMeasure<F>] {
        &self.measures
    }

    /// `mu_alpha`, one-based.
    pub fn measure(&self, alpha: usize) -> &DiscreteMeasure<F> {
        &self.measures[alpha - 1]
    }

    pub fn kernels(&self) -> &[CouplingKernel<F>] {
        &self.kernels
    }

    /// `rho_alpha` for `2 <= alpha <= p - 1`.
    pub fn kernel(&self, alpha: usize) -> &CouplingKernel<F> {
        &self.kernels[alpha - 2]
    }

    /// The same chain at another `N`.
    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    pub fn with_measures(&self, measures: Vec<DiscreteMeasure<F>>) -> Result<Self> {
        Self::new(self.p, self.n, measures, self.kernels.clone())
    }

    pub fn with_kernels(&self, kernels: Vec<CouplingKernel<F>>) -> Result<Self> {
        Self::new(self.p, self.n, self.measures.clone(), kernels)
    }

    /// `rho_alpha(y_s, x_t)` over the `y` atoms of `mu_{alpha-1}` (rows) and
    /// the `x` atoms of `mu_alpha` (columns).
    pub fn kernel_matrix(&self, alpha: usize) -> Result<Matrix<F>> {
        kernel_matrix(self.kernel(alpha), self.measure(alpha - 1), self.measure(alpha))
    }

    /// The same chain over another field.
    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> ChainSpec<G> {
        ChainSpec {
            p: self.p,
            n: self.n,
            measures: self.measures.iter().map(|m| m.map(&f)).collect(),
            kernels: self.kernels.iter().map(|k| k.map(&f)).collect(),
        }
    }

    /// Total atom count, for cost estimates.
    pub fn atom_count(&self) -> usize {
        self.measures.iter().map(DiscreteMeasure::len).sum()
    }
}

pub(crate) fn kernel_matrix<F: Field>(
    k: &CouplingKernel<F>,
    left: &DiscreteMeasure<F>,
    right: &DiscreteMeasure<F>,
) -> Result<Matrix<F>> {
    if let CouplingKernel::Polynomial(poly) = k {
        let ys: Vec<F> = left.atoms().iter().map(|a| a.y.clone()).collect();
        let xs: Vec<F> = right.atoms().iter().map(|a| a.x.clone()).collect();
        return Ok(poly.table(&ys, &xs));
    }
    let mut m = Matrix::zeros(left.len(), right.len());
    for (s, a) in left.atoms().iter().enumerate() {
        for (t, b) in right.atoms().iter().enumerate() {
            m[(s, t)] = k.eval(&a.y, &b.x)?;
        }
    }
    Ok(m)
}

/// A closed chain: `p` measures and `p` kernels, the last measure feeding
/// back into the first through `rho_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedChainSpec<F> {
    p: usize,
    n: usize,
    measures: Vec<DiscreteMeasure<F>>,
    kernels: Vec<CouplingKernel<F>>,
}

impl<F: Field> ClosedChainSpec<F> {
    /// `kernels[i]` is `rho_{i+1}`; `rho_alpha` couples the `y` of
    /// `mu_{alpha-1}` (cyclically, `mu_p` for `alpha = 1`) to the `x` of
    /// `mu_alpha`.
    pub fn new(p: usize, n: usize, measures: Vec<DiscreteMeasure<F>>, kernels: Vec<CouplingKernel<F>>) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidChain("closed chain needs p >= 1".into()));
        }
        if measures.len() != p || kernels.len() != p {
            return Err(Error::InvalidChain(format!(
                "closed chain with p = {p} needs {p} measures and {p} kernels, got {} and {}",
                measures.len(),
                kernels.len()
            )));
        }
        let measures = measures.into_iter().enumerate().map(|(i, m)| m.with_label(i + 1)).collect();
        Ok(Self { p, n, measures, kernels })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn measures(&self) -> &[DiscreteMeasure<F>] {
        &self.measures
    }

    pub fn kernels(&self) -> &[CouplingKernel<F>] {
        &self.kernels
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> ClosedChainSpec<G> {
        ClosedChainSpec {
            p: self.p,
            n: self.n,
            measures: self.measures.iter().map(|m| m.map(&f)).collect(),
            kernels: self.kernels.iter().map(|k| k.map(&f)).collect(),
        }
    }

    /// `rho_alpha` between `mu_{alpha-1}` and `mu_alpha`, both cyclic.
    pub fn kernel_matrix(&self, alpha: usize) -> Result<Matrix<F>> {
        let left = if alpha == 1 { self.p } else { alpha - 1 };
        kernel_matrix(&self.kernels[alpha - 1], &self.measures[left - 1], &self.measures[alpha - 1])
    }
}
