use crate::error::{Error, Result};
use crate::numerics::Field;

/// One support point `(x, y)` of a two-variable measure with its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom<F> {
    pub x: F,
    pub y: F,
    pub w: F,
}

impl<F: Field> Atom<F> {
    pub fn new(x: F, y: F, w: F) -> Self {
        Self { x, y, w }
    }
}

/// Finite-support measure `dmu_alpha(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<F> {
    label: usize,
    atoms: Vec<Atom<F>>,
}

impl<F: Field> DiscreteMeasure<F> {
    pub fn new(label: usize, atoms: Vec<Atom<F>>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidChain(format!("measure {label} has no atoms")));
        }
        Ok(Self { label, atoms })
    }

    /// Convenience constructor from `(x, y, w)` integer triples.
    pub fn from_ints(label: usize, atoms: &[(i64, i64, i64)]) -> Result<Self> {
        Self::new(
            label,
            atoms.iter().map(|&(x, y, w)| Atom::new(F::from_i64(x), F::from_i64(y), F::from_i64(w))).collect(),
        )
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn atoms(&self) -> &[Atom<F>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.label = label;
        self
    }

    pub(crate) fn map_weights(&self, mut f: impl FnMut(&Atom<F>) -> Result<F>) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok(Atom { x: a.x.clone(), y: a.y.clone(), w: f(a)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { label: self.label, atoms })
    }

    /// The same measure over another field.
    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> DiscreteMeasure<G> {
        DiscreteMeasure {
            label: self.label,
            atoms: self.atoms.iter().map(|a| Atom::new(f(&a.x), f(&a.y), f(&a.w))).collect(),
        }
    }

    /// Atoms reordered (or resampled) by index.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self { label: self.label, atoms: order.iter().map(|&i| self.atoms[i].clone()).collect() }
    }
}
