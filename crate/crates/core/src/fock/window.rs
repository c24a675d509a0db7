use crate::error::{Error, Result};

/// Maximum number of flat modes a [`Pattern`] can hold.
pub const MAX_MODES: usize = 256;

/// Truncation of the mode lattice: `p` components, each with levels
/// `-M..M`. Flat mode `p n + alpha - 1` occupies bit `p (n + M) + alpha - 1`,
/// so bit order is flat order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeWindow {
    p: usize,
    levels: usize,
}

impl ModeWindow {
    pub fn new(p: usize, levels: usize) -> Result<Self> {
        if p == 0 || levels == 0 {
            return Err(Error::InadequateWindow(format!("window needs p >= 1 and M >= 1, got p = {p}, M = {levels}")));
        }
        if 2 * p * levels > MAX_MODES {
            return Err(Error::InadequateWindow(format!("{} modes exceed the supported {MAX_MODES}", 2 * p * levels)));
        }
        Ok(Self { p, levels })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// `M`: levels per component are `-M..M`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn modes(&self) -> usize {
        2 * self.p * self.levels
    }

    pub fn doubled(&self) -> Result<Self> {
        Self::new(self.p, 2 * self.levels)
    }

    pub fn contains(&self, level: i64) -> bool {
        let m = self.levels as i64;
        (-m..m).contains(&level)
    }

    /// Bit of mode `f^(alpha)_level`.
    pub fn bit(&self, alpha: usize, level: i64) -> Result<usize> {
        if alpha == 0 || alpha > self.p || !self.contains(level) {
            return Err(Error::OutsideWindow { component: alpha, level, levels: self.levels });
        }
        Ok(self.p * (level + self.levels as i64) as usize + alpha - 1)
    }

    /// Dirac sea: every negative level filled.
    pub fn vacuum(&self) -> Pattern {
        let mut pat = Pattern::EMPTY;
        for bit in 0..self.p * self.levels {
            pat.set(bit);
        }
        pat
    }
}

/// Occupation bitmask over flat modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern([u64; 4]);

impl Pattern {
    pub const EMPTY: Pattern = Pattern([0; 4]);

    pub fn get(&self, bit: usize) -> bool {
        self.0[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn set(&mut self, bit: usize) {
        self.0[bit / 64] |= 1 << (bit % 64);
    }

    pub fn clear(&mut self, bit: usize) {
        self.0[bit / 64] &= !(1 << (bit % 64));
    }

    /// Occupied modes strictly above `bit`.
    pub fn count_above(&self, bit: usize) -> u32 {
        let word = bit / 64;
        let shift = bit % 64;
        let mut n = if shift == 63 { 0 } else { (self.0[word] >> (shift + 1)).count_ones() };
        for w in &self.0[word + 1..] {
            n += w.count_ones();
        }
        n
    }

    pub fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
}
