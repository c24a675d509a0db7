use crate::error::{Error, Result};
use crate::numerics::Field;

/// Finite bilinear exponent `h = sum h_ij f_i fbar_j` on one fermion
/// component; `g = e^h`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearSpec<F> {
    component: usize,
    terms: Vec<(i64, i64, F)>,
}

impl<F: Field> BilinearSpec<F> {
    pub fn new(component: usize, terms: Vec<(i64, i64, F)>) -> Result<Self> {
        if component == 0 {
            return Err(Error::InvalidChain("components are numbered from 1".into()));
        }
        let terms = terms.into_iter().filter(|(_, _, h)| !h.is_zero()).collect();
        Ok(Self { component, terms })
    }

    /// `h = 0`, so `g` is the identity.
    pub fn identity(component: usize) -> Self {
        Self { component, terms: Vec::new() }
    }

    pub fn component(&self) -> usize {
        self.component
    }

    pub fn terms(&self) -> &[(i64, i64, F)] {
        &self.terms
    }

    pub fn is_identity(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `|level|` touched, counting `-1 - n` for negative levels so
    /// that a window of `M` levels holds any level with `reach < M`.
    pub fn reach(&self) -> i64 {
        self.terms.iter().flat_map(|(i, j, _)| [*i, *j]).map(|n| if n < 0 { -1 - n } else { n }).max().unwrap_or(-1)
    }

    /// Strictly triangular `h` is nilpotent and `e^h` factorizes.
    pub fn is_strictly_triangular(&self) -> bool {
        self.terms.iter().all(|(i, j, _)| i > j) || self.terms.iter().all(|(i, j, _)| i < j)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> BilinearSpec<G> {
        BilinearSpec { component: self.component, terms: self.terms.iter().map(|(i, j, h)| (*i, *j, f(h))).collect() }
    }

    pub fn with_component(&self, component: usize) -> Self {
        Self { component, terms: self.terms.clone() }
    }
}
