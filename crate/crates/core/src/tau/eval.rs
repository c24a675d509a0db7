//! Tau functions of deformed chains, by measure deformation and natively in
//! Fock space.

use crate::chain_eval::z_det;
use crate::ensemble::{deform_measure, BilinearSpec, ChainSpec, CouplingKernel, KernelTable, Slot, TimeDeformation};
use crate::error::{Error, Result};
use crate::fock::{
    apply_exp_bilinear, apply_exp_hbar, apply_field_f, apply_field_fbar, chain_vev, charged_vacuum, vev, FockOptions,
    FockVector, ModeWindow,
};
use crate::numerics::{Field, Matrix};

/// A chain together with the times and charges that deform it.
///
/// `gspecs[i]` generates the kernel `rho_{i+2}`; it is needed only when an
/// interior component carries times or a charge.
#[derive(Debug, Clone)]
pub struct DeformedChain<F> {
    pub base: ChainSpec<F>,
    pub deformation: TimeDeformation,
    pub gspecs: Option<Vec<BilinearSpec<F>>>,
    pub opts: FockOptions,
}

impl<F: Field> DeformedChain<F> {
    pub fn new(base: ChainSpec<F>, deformation: TimeDeformation, opts: FockOptions) -> Result<Self> {
        deformation.validate(base.p())?;
        Ok(Self { base, deformation, gspecs: None, opts })
    }

    pub fn with_gspecs(mut self, gspecs: Vec<BilinearSpec<F>>) -> Self {
        self.gspecs = Some(gspecs);
        self
    }

    pub fn with_deformation(&self, deformation: TimeDeformation) -> Self {
        Self { deformation, ..self.clone() }
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { base: self.base.with_n(n), ..self.clone() }
    }

    fn times(&self, alpha: usize) -> (Vec<F>, Vec<F>) {
        let conv = |v: &[f64]| v.iter().map(|&x| F::from_f64(x)).collect::<Vec<F>>();
        (conv(self.deformation.t(alpha)), conv(self.deformation.tbar(alpha)))
    }

    fn is_quiet(&self, alpha: usize) -> bool {
        self.deformation.charge(alpha) == 0
            && self.deformation.t(alpha).iter().chain(self.deformation.tbar(alpha)).all(|&v| v == 0.0)
    }
}

/// `e^{sum_k k t_k tbar_k}`.
pub fn a_factor<F: Field>(t: &[F], tbar: &[F]) -> Result<F> {
    let s = t.iter().zip(tbar).enumerate().fold(F::zero(), |acc, (k, (a, b))| acc + F::from_i64(k as i64 + 1) * a * b);
    if s.is_zero() {
        Ok(F::one())
    } else {
        s.exp()
    }
}

fn negated<F: Field>(v: &[F]) -> Vec<F> {
    v.iter().map(|x| -x.clone()).collect()
}

/// `tau_N` through the deformed chain: `mu_1` picks up
/// `x^{n1} e^{V(x, t1) - V(1/x, tbar1)}`, `mu_{p-1}` picks up
/// `y^{np} e^{-V(y, tp) + V(1/y, tbarp)}`, interior kernels become one-pair
/// expectation values with the interior times, and the endpoint factors
/// `a_1 a_p` multiply `Z_N`.
pub fn tau_eval<F: Field>(d: &DeformedChain<F>) -> Result<F> {
    let c = &d.base;
    let p = c.p();
    let n = c.n();
    let (t1, tb1) = d.times(1);
    let (tp, tbp) = d.times(p);

    let mut measures = c.measures().to_vec();
    measures[0] = deform_measure(&measures[0], &t1, d.deformation.charge(1), &negated(&tb1), Slot::X)?;
    measures[p - 2] = deform_measure(&measures[p - 2], &negated(&tp), d.deformation.charge(p), &tbp, Slot::Y)?;

    let mut scale = a_factor(&t1, &tb1)? * &a_factor(&tp, &tbp)?;
    let mut kernels = c.kernels().to_vec();
    for alpha in 2..p {
        // tables from the bilinears are rebuilt at this window so both
        // routes truncate the same way
        if d.is_quiet(alpha) && d.gspecs.is_none() {
            continue;
        }
        let g = d.gspecs.as_ref().map(|gs| &gs[alpha - 2]).ok_or_else(|| {
            Error::InvalidChain(format!("component {alpha} is deformed but rho_{alpha} has no bilinear"))
        })?;
        let (t, tb) = d.times(alpha);
        let charge = d.deformation.charge(alpha);
        let ys: Vec<F> = measures[alpha - 2].atoms().iter().map(|a| a.y.clone()).collect();
        let xs: Vec<F> = measures[alpha - 1].atoms().iter().map(|a| a.x.clone()).collect();
        let mut values = Matrix::zeros(ys.len(), xs.len());
        for (i, y) in ys.iter().enumerate() {
            for (j, x) in xs.iter().enumerate() {
                values[(i, j)] = deformed_pair(g, &t, &tb, charge, Some((y, x)), &d.opts)?;
            }
        }
        kernels[alpha - 2] = CouplingKernel::Table(KernelTable::new(ys, xs, values)?);
        let norm = deformed_pair(g, &t, &tb, charge, None, &d.opts)?;
        if n > 1 {
            let inv = norm.inv().ok_or_else(|| Error::DegenerateTau(format!("<g_{alpha}> vanishes")))?;
            scale = scale * &inv.pow_int(n as i64 - 1).expect("positive power");
        }
    }
    let deformed = ChainSpec::new(p, n, measures, kernels)?;
    Ok(scale * &z_det(&deformed)?)
}

/// `<bra| e^{H(t)} A_1^N g_2 ... A_{p-1}^N e^{Hbar(tbar)} |ket>` for arbitrary
/// charge vectors. Charges that do not balance give zero.
pub fn tau_fock_vev<F: Field>(d: &DeformedChain<F>, bra_charges: &[i64], ket_charges: &[i64]) -> Result<F> {
    let w = ModeWindow::new(d.base.p(), d.opts.levels)?;
    let mut ket: FockVector<F> = charged_vacuum(ket_charges, w)?;
    let mut bra: FockVector<F> = charged_vacuum(bra_charges, w)?;
    for alpha in 1..=d.base.p() {
        let (t, tb) = d.times(alpha);
        ket = apply_exp_hbar(&ket, alpha, &tb, d.opts.order)?;
        bra = apply_exp_hbar(&bra, alpha, &t, d.opts.order)?;
    }
    chain_vev(bra, ket, &d.base, d.gspecs.as_deref(), &d.opts)
}

/// `<n| e^{H(t)} fbar(y) g f(x) e^{Hbar(tbar)} |n>` on one component, or
/// `<n| e^{H(t)} g e^{Hbar(tbar)} |n>` when `pair` is `None`.
pub fn deformed_pair<F: Field>(
    g: &BilinearSpec<F>,
    t: &[F],
    tbar: &[F],
    charge: i64,
    pair: Option<(&F, &F)>,
    opts: &FockOptions,
) -> Result<F> {
    let w = ModeWindow::new(1, opts.levels)?;
    let g1 = g.with_component(1);
    let mut ket = apply_exp_hbar(&charged_vacuum(&[charge], w)?, 1, tbar, opts.order)?;
    if let Some((_, x)) = pair {
        ket = apply_field_f(&ket, 1, x, opts.cutoff)?;
    }
    ket = apply_exp_bilinear(&ket, &g1, opts.order)?;
    if let Some((y, _)) = pair {
        ket = apply_field_fbar(&ket, 1, y, opts.cutoff)?;
    }
    let bra = apply_exp_hbar(&charged_vacuum(&[charge], w)?, 1, t, opts.order)?;
    vev(&bra, &ket)
}

/// `tau_N` as the literal expectation value
/// `<N + n1, n2, ..., -N - np| e^{H(t)} e^{A_1} g_2 ... e^{A_{p-1}}
/// e^{Hbar(tbar)} |n1, n2, ..., -np>`, rescaled by `(N!)^{p-1}` and the
/// reordering sign `(-1)^{N(N+1)/2 + N np}` so that it matches
/// [`tau_eval`]. Only the `A_alpha^N / N!` terms survive the charges, so the
/// factorials cancel and the `A_alpha^N` are applied directly.
pub fn tau_eval_fock<F: Field>(d: &DeformedChain<F>) -> Result<F> {
    let c = &d.base;
    let p = c.p();
    let n = c.n();
    let opts = &d.opts;
    if n > opts.cutoff || opts.cutoff > opts.levels {
        return Err(Error::InadequateWindow(format!(
            "need N <= L <= M, got N = {n}, L = {}, M = {}",
            opts.cutoff, opts.levels
        )));
    }
    let charges = &d.deformation.charges;
    let mut ket_charges = charges.clone();
    ket_charges[p - 1] = -charges[p - 1];
    let mut bra_charges = ket_charges.clone();
    bra_charges[0] += n as i64;
    bra_charges[p - 1] -= n as i64;
    let v = tau_fock_vev(d, &bra_charges, &ket_charges)?;
    let flips = n * (n + 1) / 2 + n * charges[p - 1].unsigned_abs() as usize;
    Ok(if flips % 2 == 1 { -v } else { v })
}
