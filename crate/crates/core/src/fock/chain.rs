//! Chain partition functions as fermionic expectation values.

use std::collections::HashMap;

use super::ops::{
    apply_a, apply_a_transposed, apply_exp_bilinear, apply_field_f, apply_field_fbar, transpose_bilinear,
};
use super::vacua::charged_vacuum;
use super::vector::{vev, FockVector};
use super::window::ModeWindow;
use crate::ensemble::{BilinearSpec, ChainSpec, CouplingKernel, KernelTable};
use crate::error::{Error, Result};
use crate::numerics::{factorial, Field, Matrix};

/// Truncation and checking parameters for the fermionic route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockOptions {
    /// `M`: each component keeps levels `-M..M`.
    pub levels: usize,
    /// `L <= M`: fields sum over levels `-L..L`.
    pub cutoff: usize,
    /// Taylor order limit for exponentials.
    pub order: usize,
    /// Recompute with `M` doubled and require the same value.
    pub check_doubling: bool,
    /// Expand every `e^{A_alpha}` fully and require that only the `N`-th
    /// order terms contribute.
    pub check_selection: bool,
}

impl FockOptions {
    pub fn new(levels: usize, cutoff: usize) -> Self {
        Self { levels, cutoff, order: 64, check_doubling: false, check_selection: false }
    }

    fn doubled(&self) -> Self {
        Self { levels: 2 * self.levels, ..*self }
    }
}

/// Tolerance for float-mode self-consistency checks.
const FLOAT_AGREE: f64 = 1e-12;

fn agree<F: Field>(a: &F, b: &F) -> bool {
    if F::MODE == crate::Mode::Exact {
        a == b
    } else {
        let scale = a.magnitude().max(b.magnitude());
        (a.clone() - b).magnitude() <= FLOAT_AGREE * scale.max(f64::MIN_POSITIVE)
    }
}

/// `rho(y, x) = <0| fbar(y) g f(x) |0>` for `g = e^h` in a one-component
/// window.
pub fn rho_from_g<F: Field>(h: &BilinearSpec<F>, y: &F, x: &F, opts: &FockOptions) -> Result<F> {
    let value = rho_in_window(h, y, x, opts)?;
    if opts.check_doubling {
        let wide = rho_in_window(h, y, x, &opts.doubled())?;
        if !agree(&value, &wide) {
            return Err(Error::InadequateWindow(format!(
                "kernel value changes from {value} to {wide} when M doubles to {}",
                2 * opts.levels
            )));
        }
    }
    Ok(value)
}

fn rho_in_window<F: Field>(h: &BilinearSpec<F>, y: &F, x: &F, opts: &FockOptions) -> Result<F> {
    let w = ModeWindow::new(1, opts.levels)?;
    check_reach(h, opts)?;
    let h1 = h.with_component(1);
    let vac = FockVector::vacuum(w);
    let ket = apply_field_f(&vac, 1, x, opts.cutoff)?;
    let ket = apply_exp_bilinear(&ket, &h1, opts.order)?;
    let ket = apply_field_fbar(&ket, 1, y, opts.cutoff)?;
    vev(&vac, &ket)
}

fn check_reach<F: Field>(h: &BilinearSpec<F>, opts: &FockOptions) -> Result<()> {
    if h.reach() >= opts.levels as i64 {
        return Err(Error::InadequateWindow(format!(
            "bilinear reaches level {} outside M = {}",
            h.reach(),
            opts.levels
        )));
    }
    Ok(())
}

/// Tabulates `rho_from_g` on the `y` atoms of `mu_{alpha-1}` and the `x`
/// atoms of `mu_alpha`, giving a kernel that makes the determinant and
/// fermionic routes refer to the same chain.
pub fn kernel_from_g<F: Field>(
    h: &BilinearSpec<F>,
    ys: &[F],
    xs: &[F],
    opts: &FockOptions,
) -> Result<CouplingKernel<F>> {
    let ys = dedup(ys);
    let xs = dedup(xs);
    let mut values = Matrix::zeros(ys.len(), xs.len());
    for (i, y) in ys.iter().enumerate() {
        for (j, x) in xs.iter().enumerate() {
            values[(i, j)] = rho_from_g(h, y, x, opts)?;
        }
    }
    Ok(CouplingKernel::Table(KernelTable::new(ys, xs, values)?))
}

fn dedup<F: Field>(v: &[F]) -> Vec<F> {
    let mut out: Vec<F> = Vec::with_capacity(v.len());
    for x in v {
        if !out.contains(x) {
            out.push(x.clone());
        }
    }
    out
}

/// Builds the open chain whose kernels are generated by `gspecs`
/// (`gspecs[i]` acts on component `i + 2`).
pub fn chain_from_g<F: Field>(
    p: usize,
    n: usize,
    measures: Vec<crate::ensemble::DiscreteMeasure<F>>,
    gspecs: &[BilinearSpec<F>],
    opts: &FockOptions,
) -> Result<ChainSpec<F>> {
    check_gspecs(p, gspecs)?;
    if measures.len() + 1 != p {
        return Err(Error::InvalidChain(format!("p = {p} needs {} measures", p - 1)));
    }
    let mut kernels = Vec::with_capacity(p.saturating_sub(2));
    for alpha in 2..p {
        let ys: Vec<F> = measures[alpha - 2].atoms().iter().map(|a| a.y.clone()).collect();
        let xs: Vec<F> = measures[alpha - 1].atoms().iter().map(|a| a.x.clone()).collect();
        kernels.push(kernel_from_g(&gspecs[alpha - 2], &ys, &xs, opts)?);
    }
    ChainSpec::new(p, n, measures, kernels)
}

fn check_gspecs<F: Field>(p: usize, gspecs: &[BilinearSpec<F>]) -> Result<()> {
    if gspecs.len() != p.saturating_sub(2) {
        return Err(Error::InvalidChain(format!(
            "p = {p} needs {} bilinears, got {}",
            p.saturating_sub(2),
            gspecs.len()
        )));
    }
    for (i, g) in gspecs.iter().enumerate() {
        if g.component() != i + 2 {
            return Err(Error::InvalidChain(format!(
                "bilinear {} acts on component {}, expected {}",
                i + 1,
                g.component(),
                i + 2
            )));
        }
    }
    Ok(())
}

/// Checks every kernel entry reachable in the chain against `rho_from_g`.
pub fn check_kernels<F: Field>(c: &ChainSpec<F>, gspecs: &[BilinearSpec<F>], opts: &FockOptions) -> Result<()> {
    check_gspecs(c.p(), gspecs)?;
    for alpha in 2..c.p() {
        let h = &gspecs[alpha - 2];
        let mut cache: HashMap<(usize, usize), F> = HashMap::new();
        let left = c.measure(alpha - 1).atoms();
        let right = c.measure(alpha).atoms();
        for (i, a) in left.iter().enumerate() {
            let iy = left.iter().position(|b| b.y == a.y).unwrap_or(i);
            for (j, b) in right.iter().enumerate() {
                let jx = right.iter().position(|d| d.x == b.x).unwrap_or(j);
                let expected = match cache.get(&(iy, jx)) {
                    Some(v) => v.clone(),
                    None => {
                        let v = rho_from_g(h, &a.y, &b.x, opts)?;
                        cache.insert((iy, jx), v.clone());
                        v
                    }
                };
                let actual = match c.kernel(alpha).eval(&a.y, &b.x) {
                    Ok(v) => v,
                    Err(Error::MissingKernelEntry { .. }) => return Err(Error::KernelMismatch { alpha, i, j }),
                    Err(e) => return Err(e),
                };
                if !agree(&actual, &expected) {
                    return Err(Error::KernelMismatch { alpha, i, j });
                }
            }
        }
    }
    Ok(())
}

/// `Z_N` as `(N!)^{p-1} <N, 0, ..., 0, -N| e^{A_1} g_2 e^{A_2} ... g_{p-1}
/// e^{A_{p-1}} |0>`.
///
/// Only the `N`-th Taylor term of each `e^{A_alpha}` survives the charge
/// bookkeeping, so the product reduces to `A_1^N g_2 ... A_{p-1}^N`.
/// Reordering that string into the blocks whose expectation factorizes into
/// Vandermondes and kernel determinants moves fermions of different
/// components past each other and costs `(-1)^{N(N+1)/2}`, which is divided
/// out.
pub fn z_fock<F: Field>(c: &ChainSpec<F>, gspecs: &[BilinearSpec<F>], opts: &FockOptions) -> Result<F> {
    check_kernels(c, gspecs, opts)?;
    let z = z_fock_unchecked(c, gspecs, opts)?;
    if opts.check_doubling {
        let wide = z_fock_unchecked(c, gspecs, &opts.doubled())?;
        if !agree(&z, &wide) {
            return Err(Error::InadequateWindow(format!(
                "z_fock changes from {z} to {wide} when M doubles to {}",
                2 * opts.levels
            )));
        }
    }
    if opts.check_selection {
        let full = z_fock_full(c, gspecs, opts)?;
        if !agree(&z, &full) {
            return Err(Error::SelectionRule(format!("full exponentials give {full}, N-th order terms give {z}")));
        }
    }
    Ok(z)
}

fn adequacy<F: Field>(c: &ChainSpec<F>, gspecs: &[BilinearSpec<F>], opts: &FockOptions) -> Result<ModeWindow> {
    let n = c.n();
    if opts.cutoff > opts.levels {
        return Err(Error::InadequateWindow(format!("field cutoff {} exceeds M = {}", opts.cutoff, opts.levels)));
    }
    if n > opts.cutoff {
        return Err(Error::InadequateWindow(format!("N = {n} needs field cutoff L >= N, got L = {}", opts.cutoff)));
    }
    for g in gspecs {
        check_reach(g, opts)?;
    }
    ModeWindow::new(c.p(), opts.levels)
}

fn endpoint_charges(p: usize, n: usize) -> Vec<i64> {
    let mut q = vec![0; p];
    q[0] = n as i64;
    q[p - 1] -= n as i64;
    q
}

fn reorder_sign<F: Field>(n: usize) -> F {
    if (n * (n + 1) / 2) % 2 == 1 {
        -F::one()
    } else {
        F::one()
    }
}

/// `<0| fbar(y_1) ... fbar(y_N) g f(x_N) ... f(x_1) |0>` on one component,
/// with `g = e^h`.
pub fn sandwich_vev<F: Field>(h: &BilinearSpec<F>, ys: &[F], xs: &[F], opts: &FockOptions) -> Result<F> {
    if ys.len() != xs.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), got: ys.len() });
    }
    let w = ModeWindow::new(1, opts.levels)?;
    let h = h.with_component(1);
    let mut ket = FockVector::vacuum(w);
    for x in xs {
        ket = apply_field_f(&ket, 1, x, opts.cutoff)?;
    }
    ket = apply_exp_bilinear(&ket, &h, opts.order)?;
    for y in ys.iter().rev() {
        ket = apply_field_fbar(&ket, 1, y, opts.cutoff)?;
    }
    vev(&FockVector::vacuum(w), &ket)
}

/// The fermionic value without the kernel consistency and window checks.
pub fn z_fock_unchecked<F: Field>(c: &ChainSpec<F>, gspecs: &[BilinearSpec<F>], opts: &FockOptions) -> Result<F> {
    check_gspecs(c.p(), gspecs)?;
    let w = adequacy(c, gspecs, opts)?;
    let n = c.n();
    let bra = charged_vacuum(&endpoint_charges(c.p(), n), w)?;
    let ket = FockVector::vacuum(w);
    Ok(reorder_sign::<F>(n) * &chain_vev(bra, ket, c, Some(gspecs), opts)?)
}

/// `<bra| A_1^N g_2 A_2^N ... g_{p-1} A_{p-1}^N |ket>`.
///
/// The first half of the string acts on the bra and the rest on the ket, so
/// each side only ever carries about half of the particle-hole pairs.
pub fn chain_vev<F: Field>(
    mut bra: FockVector<F>,
    mut ket: FockVector<F>,
    c: &ChainSpec<F>,
    gspecs: Option<&[BilinearSpec<F>]>,
    opts: &FockOptions,
) -> Result<F> {
    let p = c.p();
    let n = c.n();
    let split = (p - 1) / 2;
    let g = |alpha: usize| -> Result<Option<&BilinearSpec<F>>> {
        match gspecs {
            Some(gs) => Ok(Some(&gs[alpha - 2])),
            None if c.kernels().is_empty() => Ok(None),
            None => Err(Error::InvalidChain("the fermionic route needs the bilinears behind the kernels".into())),
        }
    };
    for alpha in 1..=split {
        if alpha >= 2 {
            if let Some(h) = g(alpha)? {
                bra = apply_exp_bilinear(&bra, &transpose_bilinear(h), opts.order)?;
            }
        }
        for _ in 0..n {
            bra = apply_a_transposed(&bra, c.measure(alpha), alpha, opts.cutoff)?;
        }
    }
    for alpha in (split + 1..p).rev() {
        for _ in 0..n {
            ket = apply_a(&ket, c.measure(alpha), alpha, opts.cutoff)?;
        }
        if alpha >= 2 {
            if let Some(h) = g(alpha)? {
                ket = apply_exp_bilinear(&ket, h, opts.order)?;
            }
        }
    }
    vev(&bra, &ket)
}

/// The literal expectation value with every `e^{A_alpha}` expanded in full
/// (each `A_alpha` is nilpotent: its atom terms commute and square to zero).
pub fn z_fock_full<F: Field>(c: &ChainSpec<F>, gspecs: &[BilinearSpec<F>], opts: &FockOptions) -> Result<F> {
    check_gspecs(c.p(), gspecs)?;
    let w = adequacy(c, gspecs, opts)?;
    let n = c.n();
    let mut v = FockVector::vacuum(w);
    for alpha in (1..c.p()).rev() {
        let mu = c.measure(alpha);
        let order = mu.len() + 1;
        v = super::ops::exp_series(&v, order, "exp of coupling operator", |u| apply_a(u, mu, alpha, opts.cutoff))?;
        if alpha >= 2 {
            v = apply_exp_bilinear(&v, &gspecs[alpha - 2], opts.order)?;
        }
    }
    let bra = charged_vacuum(&endpoint_charges(c.p(), n), w)?;
    let scale = F::from_bigint(&factorial(n).pow((c.p() - 1) as u32));
    Ok(reorder_sign::<F>(n) * &scale * &vev(&bra, &v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain_eval::{z_bruteforce, z_det};
    use crate::ensemble::DiscreteMeasure;
    use crate::family::fock_family;
    use crate::numerics::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn opts() -> FockOptions {
        FockOptions::new(4, 3)
    }

    #[test]
    fn fock_examples() {
        let single =
            ChainSpec::<Rational>::new(2, 1, vec![DiscreteMeasure::from_ints(1, &[(2, 3, 5)]).unwrap()], vec![])
                .unwrap();
        assert_eq!(z_fock(&single, &[], &opts()).unwrap(), r(5));
        let pair = ChainSpec::<Rational>::new(
            2,
            2,
            vec![DiscreteMeasure::from_ints(1, &[(1, 1, 1), (2, 3, 1)]).unwrap()],
            vec![],
        )
        .unwrap();
        assert_eq!(z_fock(&pair, &[], &opts()).unwrap(), r(4));

        let g = [BilinearSpec::<Rational>::identity(2)];
        let measures = vec![
            DiscreteMeasure::from_ints(1, &[(1, 2, 1)]).unwrap(),
            DiscreteMeasure::from_ints(2, &[(3, 4, 2)]).unwrap(),
        ];
        let three = chain_from_g(3, 1, measures, &g, &opts()).unwrap();
        assert_eq!(z_fock(&three, &g, &opts()).unwrap(), z_det(&three).unwrap());
    }

    #[test]
    fn identity_kernel_is_truncated_cauchy() {
        let h = BilinearSpec::<Rational>::identity(1);
        let (y, x) = (r(3), Rational::new(1.into(), 2.into()));
        let got = rho_from_g(&h, &y, &x, &opts()).unwrap();
        let expected = (0..3).fold(r(0), |acc, k| acc + x.pow_int(k).unwrap() * y.pow_int(-k - 1).unwrap());
        assert_eq!(got, expected);
    }

    #[test]
    fn nilpotent_kernel_by_hand() {
        // h = c f_1 fbar_0: e^h = 1 + h, and
        // <0| fbar(y) (1 + c f_1 fbar_0) f(x) |0> = free + c x^0 y^{-2}
        let c = r(5);
        let h = BilinearSpec::new(1, vec![(1, 0, c.clone())]).unwrap();
        let (y, x) = (r(2), r(3));
        let free = rho_from_g(&BilinearSpec::identity(1), &y, &x, &opts()).unwrap();
        let got = rho_from_g(&h, &y, &x, &opts()).unwrap();
        assert_eq!(got - free, c * y.pow_int(-2).unwrap());
    }

    #[test]
    fn fock_route_matches_other_routes() {
        for case in fock_family(11, 8).unwrap() {
            let mut o = case.opts;
            o.check_doubling = true;
            o.check_selection = true;
            let z = z_fock(&case.chain, &case.gspecs, &o).unwrap();
            assert_eq!(z, z_det(&case.chain).unwrap(), "{:?}", case.chain);
            assert_eq!(z, z_bruteforce(&case.chain).unwrap());
        }
    }

    #[test]
    fn four_component_chain() {
        let mut rng = crate::family::rng(2);
        for n in 1..=2 {
            let measures = (1..4).map(|a| crate::family::random_measure(&mut rng, a, 2, true).unwrap()).collect();
            let g: Vec<_> = (2..4).map(|a| crate::family::random_nilpotent(&mut rng, a)).collect();
            let c = chain_from_g(4, n, measures, &g, &opts()).unwrap();
            assert_eq!(z_fock(&c, &g, &opts()).unwrap(), z_det(&c).unwrap());
        }
    }

    #[test]
    fn corrupted_table_is_located() {
        let case = fock_family(5, 20).unwrap().into_iter().find(|c| c.chain.p() == 3).unwrap();
        let mut kernels = case.chain.kernels().to_vec();
        let CouplingKernel::Table(t) = &mut kernels[0] else { panic!("table kernel expected") };
        let (ys, xs) = (t.ys().to_vec(), t.xs().to_vec());
        let v = t.values()[(0, 0)].clone();
        t.set(0, 0, v + r(1));
        let bad = case.chain.with_kernels(kernels).unwrap();
        let i = bad.measure(1).atoms().iter().position(|a| a.y == ys[0]).unwrap();
        let j = bad.measure(2).atoms().iter().position(|a| a.x == xs[0]).unwrap();
        assert_eq!(z_fock(&bad, &case.gspecs, &case.opts), Err(Error::KernelMismatch { alpha: 2, i, j }));
    }

    #[test]
    fn inadequate_windows_are_rejected() {
        let pair = ChainSpec::<Rational>::new(
            2,
            2,
            vec![DiscreteMeasure::from_ints(1, &[(1, 1, 1), (2, 3, 1)]).unwrap()],
            vec![],
        )
        .unwrap();
        assert!(matches!(z_fock(&pair, &[], &FockOptions::new(4, 1)), Err(Error::InadequateWindow(_))));
        assert!(matches!(z_fock(&pair, &[], &FockOptions::new(2, 3)), Err(Error::InadequateWindow(_))));
        let far = BilinearSpec::new(1, vec![(5, 0, r(1))]).unwrap();
        assert!(rho_from_g(&far, &r(1), &r(2), &opts()).is_err());
    }
}
