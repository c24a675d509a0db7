use super::measure::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::numerics::Field;

/// Which variable of a measure a deformation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    X,
    Y,
}

/// Finitely supported times `t^(alpha)_k`, `tbar^(alpha)_k` and charges
/// `n^(alpha)` for `alpha = 1..p`. `t[alpha - 1][k - 1]` is `t^(alpha)_k`.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct TimeDeformation {
    pub t: Vec<Vec<f64>>,
    pub tbar: Vec<Vec<f64>>,
    pub charges: Vec<i64>,
}

impl TimeDeformation {
    pub fn zero(p: usize) -> Self {
        Self { t: vec![Vec::new(); p], tbar: vec![Vec::new(); p], charges: vec![0; p] }
    }

    pub fn p(&self) -> usize {
        self.charges.len()
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.t.len() != p || self.tbar.len() != p || self.charges.len() != p {
            return Err(Error::InvalidChain(format!("deformation needs {p} entries for t, tbar and charges")));
        }
        if self.t.iter().chain(&self.tbar).flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidChain("non-finite time".into()));
        }
        Ok(())
    }

    /// `t^(alpha)`, one-based.
    pub fn t(&self, alpha: usize) -> &[f64] {
        &self.t[alpha - 1]
    }

    pub fn tbar(&self, alpha: usize) -> &[f64] {
        &self.tbar[alpha - 1]
    }

    pub fn charge(&self, alpha: usize) -> i64 {
        self.charges[alpha - 1]
    }

    /// Copy with `t^(alpha)_k` replaced.
    pub fn with_t(&self, alpha: usize, k: usize, v: f64) -> Self {
        let mut d = self.clone();
        set_time(&mut d.t[alpha - 1], k, v);
        d
    }

    pub fn with_tbar(&self, alpha: usize, k: usize, v: f64) -> Self {
        let mut d = self.clone();
        set_time(&mut d.tbar[alpha - 1], k, v);
        d
    }

    pub fn is_trivial(&self) -> bool {
        self.charges.iter().all(|&n| n == 0) && self.t.iter().chain(&self.tbar).flatten().all(|&v| v == 0.0)
    }
}

fn set_time(seq: &mut Vec<f64>, k: usize, v: f64) {
    if seq.len() < k {
        seq.resize(k, 0.0);
    }
    seq[k - 1] = v;
}

/// `V(x, t) = sum_{m >= 1} x^m t_m`, with `t[0] = t_1`.
pub fn eval_v<F: Field>(x: &F, t: &[F]) -> F {
    let mut acc = F::zero();
    let mut pw = F::one();
    for tm in t {
        pw = pw * x;
        if !tm.is_zero() {
            acc = acc + pw.clone() * tm;
        }
    }
    acc
}

/// `V(x^{-1}, t)`; needs `x != 0` unless every time vanishes.
pub fn eval_v_inverse<F: Field>(x: &F, t: &[F]) -> Result<F> {
    if t.iter().all(Field::is_zero) {
        return Ok(F::zero());
    }
    let inv = x.inv().ok_or_else(|| Error::ZeroSupport("V(1/x, t) evaluated at x = 0".into()))?;
    Ok(eval_v(&inv, t))
}

/// Multiplies each weight by `u^n exp(V(u, t) + V(u^{-1}, tbar))`, with `u`
/// the variable picked by `slot`.
///
/// Pure charge shifts stay in the measure's own mode; nonzero times need
/// float mode.
pub fn deform_measure<F: Field>(
    m: &DiscreteMeasure<F>,
    t: &[F],
    n: i64,
    tbar: &[F],
    slot: Slot,
) -> Result<DiscreteMeasure<F>> {
    let timed = t.iter().chain(tbar).any(|v| !v.is_zero());
    if timed && F::MODE == crate::Mode::Exact {
        return Err(Error::ExactTranscendental("deform_measure"));
    }
    m.map_weights(|a| {
        let u = match slot {
            Slot::X => &a.x,
            Slot::Y => &a.y,
        };
        let mut w = a.w.clone();
        if n != 0 {
            let pw =
                u.pow_int(n).ok_or_else(|| Error::ZeroSupport(format!("u^{n} at u = 0 in measure {}", m.label())))?;
            w = w * &pw;
        }
        if timed {
            let exponent = eval_v(u, t) + eval_v_inverse(u, tbar)?;
            w = w * &exponent.exp()?;
        }
        Ok(w)
    })
}
