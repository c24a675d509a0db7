use std::collections::BTreeMap;

use super::window::{ModeWindow, Pattern};
use crate::error::{Error, Result};
use crate::numerics::Field;

/// Sparse state over occupation patterns of a [`ModeWindow`].
///
/// Bras are stored the same way, as coefficient vectors on the dual basis;
/// acting on a bra from the right is acting on its coefficients with the
/// transposed operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector<F> {
    window: ModeWindow,
    amps: BTreeMap<Pattern, F>,
}

impl<F: Field> FockVector<F> {
    pub fn zero(window: ModeWindow) -> Self {
        Self { window, amps: BTreeMap::new() }
    }

    pub fn basis(window: ModeWindow, pattern: Pattern) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(pattern, F::one());
        Self { window, amps }
    }

    pub fn vacuum(window: ModeWindow) -> Self {
        Self::basis(window, window.vacuum())
    }

    pub fn window(&self) -> ModeWindow {
        self.window
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitude(&self, pattern: &Pattern) -> F {
        self.amps.get(pattern).cloned().unwrap_or_else(F::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Pattern, &F)> {
        self.amps.iter()
    }

    /// Largest amplitude magnitude, for float convergence tests.
    pub fn max_magnitude(&self) -> f64 {
        self.amps.values().map(Field::magnitude).fold(0.0, f64::max)
    }

    pub(crate) fn accumulate(&mut self, pattern: Pattern, v: F) {
        if v.is_zero() {
            return;
        }
        match self.amps.get_mut(&pattern) {
            Some(a) => {
                let sum = std::mem::replace(a, F::zero()) + &v;
                if sum.is_zero() {
                    self.amps.remove(&pattern);
                } else {
                    *a = sum;
                }
            }
            None => {
                self.amps.insert(pattern, v);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FockVector<F>, c: &F) -> Result<()> {
        self.check_window(other)?;
        if c.is_zero() {
            return Ok(());
        }
        for (pat, a) in &other.amps {
            self.accumulate(*pat, a.clone() * c);
        }
        Ok(())
    }

    pub fn scaled(&self, c: &F) -> Self {
        let mut out = Self::zero(self.window);
        if !c.is_zero() {
            for (pat, a) in &self.amps {
                out.accumulate(*pat, a.clone() * c);
            }
        }
        out
    }

    fn check_window(&self, other: &FockVector<F>) -> Result<()> {
        if self.window != other.window {
            return Err(Error::InadequateWindow(format!(
                "window mismatch: M = {} vs M = {}",
                self.window.levels(),
                other.window.levels()
            )));
        }
        Ok(())
    }

    /// Creation operator `f^(alpha)_level`; the sign counts occupied modes
    /// above it in flat order.
    pub fn apply_f(&self, alpha: usize, level: i64) -> Result<Self> {
        let bit = self.window.bit(alpha, level)?;
        Ok(self.flip(bit, false, &F::one()))
    }

    /// Annihilation operator `fbar^(alpha)_level`.
    pub fn apply_fbar(&self, alpha: usize, level: i64) -> Result<Self> {
        let bit = self.window.bit(alpha, level)?;
        Ok(self.flip(bit, true, &F::one()))
    }

    /// `c` times the single-mode operator on `bit`, accumulated into `out`.
    pub(crate) fn flip_into(&self, out: &mut Self, bit: usize, occupied: bool, c: &F) {
        for (pat, a) in &self.amps {
            if pat.get(bit) != occupied {
                continue;
            }
            let mut next = *pat;
            if occupied {
                next.clear(bit);
            } else {
                next.set(bit);
            }
            let v = a.clone() * c;
            out.accumulate(next, if pat.count_above(bit) % 2 == 1 { -v } else { v });
        }
    }

    fn flip(&self, bit: usize, occupied: bool, c: &F) -> Self {
        let mut out = Self::zero(self.window);
        self.flip_into(&mut out, bit, occupied, c);
        out
    }

    /// `f_i fbar_j` in one pass: annihilate `j`, then create `i`.
    pub(crate) fn hop_into(&self, out: &mut Self, create: usize, annihilate: usize, c: &F) {
        for (pat, a) in &self.amps {
            if !pat.get(annihilate) {
                continue;
            }
            let mut mid = *pat;
            mid.clear(annihilate);
            if mid.get(create) {
                continue;
            }
            let flips = pat.count_above(annihilate) + mid.count_above(create);
            let mut next = mid;
            next.set(create);
            let v = a.clone() * c;
            out.accumulate(next, if flips % 2 == 1 { -v } else { v });
        }
    }

    /// Pairing `<bra|ket>` of a bra coefficient vector with a ket.
    pub fn vev(bra: &Self, ket: &Self) -> Result<F> {
        bra.check_window(ket)?;
        let (small, large) = if bra.len() <= ket.len() { (bra, ket) } else { (ket, bra) };
        let mut acc = F::zero();
        for (pat, a) in &small.amps {
            if let Some(b) = large.amps.get(pat) {
                acc = acc + a.clone() * b;
            }
        }
        Ok(acc)
    }
}

/// `<bra|ket>`.
pub fn vev<F: Field>(bra: &FockVector<F>, ket: &FockVector<F>) -> Result<F> {
    FockVector::vev(bra, ket)
}
