//! Miwa shifts, the one-component kernel check and the Toda residual.

use rayon::prelude::*;
use serde::Serialize;

use super::eval::{deformed_pair, tau_eval, DeformedChain};
use crate::ensemble::{eval_v, eval_v_inverse, BilinearSpec, TimeDeformation};
use crate::error::{Error, Result};
use crate::fock::FockOptions;
use crate::numerics::{factorial, Field};

/// `t + [x]`: adds `x^k / k` to `t_k` for `k <= depth`.
pub fn miwa_shift<F: Field>(t: &[F], x: &F, depth: usize) -> Vec<F> {
    let mut out = t.to_vec();
    if out.len() < depth {
        out.resize(depth, F::zero());
    }
    let mut pw = F::one();
    for (k, slot) in out.iter_mut().take(depth).enumerate() {
        pw = pw * x;
        let inv_k = F::from_i64(k as i64 + 1).inv().expect("k >= 1");
        *slot = slot.clone() + &(pw.clone() * &inv_k);
    }
    out
}

/// One grid point of [`kernel_miwa_check`].
#[derive(Debug, Clone, Serialize)]
pub struct MiwaPoint {
    pub x: f64,
    pub y: f64,
    /// `<n| e^{H(t)} fbar(y) g f(x) e^{Hbar(tbar)} |n>`.
    pub kernel: f64,
    /// The Miwa-shifted one-component tau with its exponential prefactor.
    pub shifted: f64,
    pub ratio: f64,
}

/// Result of fitting `kernel / shifted = c x^a y^b` over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct MiwaReport {
    pub charge: i64,
    pub depth: usize,
    pub levels: usize,
    pub points: Vec<MiwaPoint>,
    pub c: f64,
    pub a: f64,
    pub b: f64,
    /// Largest relative deviation of a ratio from the fitted monomial.
    pub max_deviation: f64,
}

/// Compares the deformed kernel with the Miwa-shifted tau function
/// `e^{-V(y, t) - V(1/x, tbar)} tau_{n+1}(t + [1/y], tbar + [x])` on the grid
/// `xs x ys`, and fits the ratio by a monomial `c x^a y^b`.
///
/// The shifted series converge for `|x| < 1 < |y|`; `depth` is the number of
/// Miwa terms kept.
#[allow(clippy::too_many_arguments)]
pub fn kernel_miwa_check(
    g: &BilinearSpec<f64>,
    t: &[f64],
    tbar: &[f64],
    n: i64,
    xs: &[f64],
    ys: &[f64],
    depth: usize,
    opts: &FockOptions,
) -> Result<MiwaReport> {
    if depth == 0 {
        return Err(Error::Config("Miwa depth must be at least 1".into()));
    }
    let grid: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    let points = grid
        .par_iter()
        .map(|&(x, y)| {
            if x == 0.0 || y == 0.0 {
                return Err(Error::ZeroSupport(format!("Miwa point (x = {x}, y = {y})")));
            }
            let kernel = deformed_pair(g, t, tbar, n, Some((&y, &x)), opts)?;
            let ts = miwa_shift(t, &(1.0 / y), depth);
            let tbs = miwa_shift(tbar, &x, depth);
            let tau = deformed_pair(g, &ts, &tbs, n + 1, None, opts)?;
            let shifted = (-eval_v(&y, t) - eval_v_inverse(&x, tbar)?).exp() * tau;
            Ok(MiwaPoint { x, y, kernel, shifted, ratio: kernel / shifted })
        })
        .collect::<Result<Vec<_>>>()?;
    let (c, a, b) = fit_monomial(&points)?;
    let max_deviation = points
        .iter()
        .map(|pt| (pt.ratio / (c * pt.x.abs().powf(a) * pt.y.abs().powf(b)) - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(MiwaReport { charge: n, depth, levels: opts.levels, points, c, a, b, max_deviation })
}

/// Least squares for `ln|r| = ln|c| + a ln|x| + b ln|y|`; `c` keeps the sign
/// of the first ratio.
fn fit_monomial(points: &[MiwaPoint]) -> Result<(f64, f64, f64)> {
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for pt in points {
        if pt.ratio == 0.0 || !pt.ratio.is_finite() {
            return Err(Error::DegenerateTau(format!("ratio {} at (x = {}, y = {})", pt.ratio, pt.x, pt.y)));
        }
        let row = [1.0, pt.x.abs().ln(), pt.y.abs().ln()];
        let rhs = pt.ratio.abs().ln();
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * rhs;
        }
    }
    let sol = solve3(ata, atb)
        .ok_or_else(|| Error::Config("Miwa grid needs at least two distinct x and two distinct y".into()))?;
    let sign = points.first().map_or(1.0, |pt| pt.ratio.signum());
    Ok((sign * sol[0].exp(), sol[1], sol[2]))
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            let pivot_row = m[col];
            for (a, b) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *a -= f * b;
            }
            v[r] -= f * v[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| m[r][c] * x[c]).sum();
        x[r] = (v[r] - s) / m[r][r];
    }
    Some(x)
}

/// Finite-difference check of
/// `d^2 log tau_N / dt dt' = eps tau_{N+1} tau_{N-1} / tau_N^2`, where `t`
/// and `t'` are the first times of components 1 and p.
#[derive(Debug, Clone, Serialize)]
pub struct TodaReport {
    pub n: usize,
    pub h: f64,
    /// The mixed second difference of `log |tau_N|`.
    pub d: f64,
    /// `tau_{N+1} tau_{N-1} / tau_N^2` at the centre.
    pub ratio: f64,
    pub taus: [f64; 3],
}

impl TodaReport {
    /// `|d - eps ratio| / |ratio|`.
    pub fn residual(&self, eps: f64) -> f64 {
        (self.d - eps * self.ratio).abs() / self.ratio.abs()
    }

    /// The sign with the smaller residual.
    pub fn best_sign(&self) -> f64 {
        if self.residual(-1.0) <= self.residual(1.0) {
            -1.0
        } else {
            1.0
        }
    }
}

/// `tau_N` normalised as a Fock expectation value of `e^{A_1} g_2 ...`,
/// i.e. [`tau_eval`] divided by `(N!)^{p-1}`.
pub fn tau_normalised(d: &DeformedChain<f64>) -> Result<f64> {
    let f = f64::from_bigint(&factorial(d.base.n()));
    Ok(tau_eval(d)? / f.powi(d.base.p() as i32 - 1))
}

/// Evaluates the Toda residual around `d.deformation` with step `h`.
///
/// The chain must carry at least `N + 1` atoms in every measure; the four
/// stencil corners and the three centre values are independent and run in
/// parallel.
pub fn toda_check(d: &DeformedChain<f64>, h: f64) -> Result<TodaReport> {
    let c = &d.base;
    let n = c.n();
    if n == 0 {
        return Err(Error::InvalidChain("the Toda check needs N >= 1".into()));
    }
    if let Some(m) = c.measures().iter().find(|m| m.len() < n + 1) {
        return Err(Error::InvalidChain(format!("measure {} has fewer than N + 1 = {} atoms", m.label(), n + 1)));
    }
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Config(format!("step must be positive, got {h}")));
    }
    let p = c.p();
    let base = &d.deformation;
    let shifted = |a: f64, b: f64| -> TimeDeformation {
        let t1 = base.t(1).first().copied().unwrap_or(0.0) + a;
        let tp = base.t(p).first().copied().unwrap_or(0.0) + b;
        base.with_t(1, 1, t1).with_t(p, 1, tp)
    };
    let jobs: Vec<(usize, TimeDeformation)> = vec![
        (n, shifted(h, h)),
        (n, shifted(h, -h)),
        (n, shifted(-h, h)),
        (n, shifted(-h, -h)),
        (n - 1, shifted(0.0, 0.0)),
        (n, shifted(0.0, 0.0)),
        (n + 1, shifted(0.0, 0.0)),
    ];
    let vals = jobs
        .par_iter()
        .map(|(k, def)| tau_normalised(&d.with_n(*k).with_deformation(def.clone())))
        .collect::<Result<Vec<f64>>>()?;
    if let Some(v) = vals.iter().find(|v| v.abs() < 1e-300 || !v.is_finite()) {
        return Err(Error::DegenerateTau(format!("tau = {v} on the stencil")));
    }
    if vals[..4].iter().chain([&vals[5]]).any(|v| v.signum() != vals[5].signum()) {
        return Err(Error::DegenerateTau("tau_N changes sign on the stencil".into()));
    }
    let l: Vec<f64> = vals.iter().map(|v| v.abs().ln()).collect();
    let dmix = (l[0] - l[1] - l[2] + l[3]) / (4.0 * h * h);
    let taus = [vals[4], vals[5], vals[6]];
    Ok(TodaReport { n, h, d: dmix, ratio: vals[6] * vals[4] / (vals[5] * vals[5]), taus })
}
