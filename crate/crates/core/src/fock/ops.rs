//! Operators built from the modes: fields, coupling operators, bilinears,
//! Hamiltonians and their exponentials.

use super::vector::FockVector;
use super::window::ModeWindow;
use crate::ensemble::{BilinearSpec, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::numerics::Field;

/// `x^k` for `-L <= k < L`, negative powers only when `x != 0`.
struct Powers<F> {
    pos: Vec<F>,
    neg: Option<Vec<F>>,
}

impl<F: Field> Powers<F> {
    fn new(x: &F, cutoff: usize) -> Self {
        let mut pos = Vec::with_capacity(cutoff + 1);
        pos.push(F::one());
        for k in 1..=cutoff {
            pos.push(pos[k - 1].clone() * x);
        }
        let neg = x.inv().map(|inv| {
            let mut neg = Vec::with_capacity(cutoff + 1);
            neg.push(F::one());
            for k in 1..=cutoff {
                neg.push(neg[k - 1].clone() * &inv);
            }
            neg
        });
        Self { pos, neg }
    }

    fn get(&self, k: i64) -> Option<&F> {
        if k >= 0 {
            Some(&self.pos[k as usize])
        } else {
            self.neg.as_ref().map(|n| &n[k.unsigned_abs() as usize])
        }
    }
}

fn check_cutoff(window: ModeWindow, cutoff: usize) -> Result<()> {
    if cutoff > window.levels() {
        return Err(Error::InadequateWindow(format!("field cutoff {cutoff} exceeds window M = {}", window.levels())));
    }
    Ok(())
}

/// Shared body of the fields and their transposes: `sum_k x^{e(k)} op_k`
/// over `k` in `-L..L`, where `e(k) = k` for `f(x)` and `-k-1` for
/// `fbar(x)`. Transposing swaps creation and annihilation but keeps the
/// weights.
fn apply_field<F: Field>(
    v: &FockVector<F>,
    alpha: usize,
    x: &F,
    cutoff: usize,
    annihilate: bool,
    barred: bool,
) -> Result<FockVector<F>> {
    let w = v.window();
    check_cutoff(w, cutoff)?;
    let powers = Powers::new(x, cutoff);
    let mut out = FockVector::zero(w);
    let l = cutoff as i64;
    for k in -l..l {
        let bit = w.bit(alpha, k)?;
        let e = if barred { -k - 1 } else { k };
        match powers.get(e) {
            Some(c) => v.flip_into(&mut out, bit, annihilate, c),
            None => {
                if v.iter().any(|(pat, _)| pat.get(bit) == annihilate) {
                    return Err(Error::ZeroSupport(format!(
                        "field at 0 needs the power {e} (component {alpha}, level {k})"
                    )));
                }
            }
        }
    }
    Ok(out)
}

/// `f^(alpha)(x) = sum_{-L <= k < L} x^k f^(alpha)_k`.
pub fn apply_field_f<F: Field>(v: &FockVector<F>, alpha: usize, x: &F, cutoff: usize) -> Result<FockVector<F>> {
    apply_field(v, alpha, x, cutoff, false, false)
}

/// `fbar^(alpha)(y) = sum_{-L <= k < L} y^{-k-1} fbar^(alpha)_k`.
pub fn apply_field_fbar<F: Field>(v: &FockVector<F>, alpha: usize, y: &F, cutoff: usize) -> Result<FockVector<F>> {
    apply_field(v, alpha, y, cutoff, true, true)
}

/// `A_alpha^T`, the right action of `A_alpha` on bra coefficients:
/// `sum_atoms w fbar^(alpha+1)(y)^T f^(alpha)(x)^T`.
pub fn apply_a_transposed<F: Field>(
    v: &FockVector<F>,
    mu: &DiscreteMeasure<F>,
    alpha: usize,
    cutoff: usize,
) -> Result<FockVector<F>> {
    let mut out = FockVector::zero(v.window());
    for atom in mu.atoms() {
        if atom.w.is_zero() {
            continue;
        }
        let mid = apply_field(v, alpha, &atom.x, cutoff, true, false)?;
        if mid.is_zero() {
            continue;
        }
        let term = apply_field(&mid, alpha + 1, &atom.y, cutoff, false, true)?;
        out.add_scaled(&term, &atom.w)?;
    }
    Ok(out)
}

/// `A_alpha = sum_atoms w f^(alpha)(x) fbar^(alpha+1)(y)`.
pub fn apply_a<F: Field>(
    v: &FockVector<F>,
    mu: &DiscreteMeasure<F>,
    alpha: usize,
    cutoff: usize,
) -> Result<FockVector<F>> {
    let mut out = FockVector::zero(v.window());
    for atom in mu.atoms() {
        if atom.w.is_zero() {
            continue;
        }
        let mid = apply_field_fbar(v, alpha + 1, &atom.y, cutoff)?;
        if mid.is_zero() {
            continue;
        }
        let term = apply_field_f(&mid, alpha, &atom.x, cutoff)?;
        out.add_scaled(&term, &atom.w)?;
    }
    Ok(out)
}

/// `h = sum h_ij f^(alpha)_i fbar^(alpha)_j`.
pub fn apply_bilinear<F: Field>(v: &FockVector<F>, h: &BilinearSpec<F>) -> Result<FockVector<F>> {
    let w = v.window();
    let mut out = FockVector::zero(w);
    for (i, j, c) in h.terms() {
        let create = w.bit(h.component(), *i)?;
        let annihilate = w.bit(h.component(), *j)?;
        v.hop_into(&mut out, create, annihilate, c);
    }
    Ok(out)
}

/// `h^T`, the operator acting on bra coefficients: `(f_i fbar_j)^T = f_j fbar_i`.
pub fn transpose_bilinear<F: Field>(h: &BilinearSpec<F>) -> BilinearSpec<F> {
    let terms = h.terms().iter().map(|(i, j, c)| (*j, *i, c.clone())).collect();
    BilinearSpec::new(h.component(), terms).expect("component already validated")
}

/// Float-mode stopping rule: a term this small relative to the running sum
/// is negligible.
const FLOAT_TAIL: f64 = 1e-16;

/// `e^X v` by Taylor series, stopping when a term vanishes exactly or (in
/// float mode) falls below [`FLOAT_TAIL`] relative to the sum.
pub fn exp_series<F: Field>(
    v: &FockVector<F>,
    order: usize,
    what: &str,
    mut op: impl FnMut(&FockVector<F>) -> Result<FockVector<F>>,
) -> Result<FockVector<F>> {
    let mut sum = v.clone();
    let mut term = v.clone();
    for k in 1..=order {
        if term.is_zero() {
            return Ok(sum);
        }
        let inv_k = F::from_i64(k as i64).inv().expect("k >= 1");
        term = op(&term)?.scaled(&inv_k);
        if term.is_zero() {
            return Ok(sum);
        }
        sum.add_scaled(&term, &F::one())?;
        if F::MODE == crate::Mode::Float && term.max_magnitude() <= FLOAT_TAIL * sum.max_magnitude() {
            return Ok(sum);
        }
    }
    if term.is_zero() {
        return Ok(sum);
    }
    Err(Error::NotConverged { what: what.to_string(), order })
}

/// `e^h v`.
pub fn apply_exp_bilinear<F: Field>(v: &FockVector<F>, h: &BilinearSpec<F>, order: usize) -> Result<FockVector<F>> {
    if h.is_identity() {
        return Ok(v.clone());
    }
    exp_series(v, order, "exp of bilinear", |u| apply_bilinear(u, h))
}

/// `H^(alpha)_k = sum_n f_n fbar_{n+k}`, truncated to `n, n + k` in window.
pub fn apply_h<F: Field>(v: &FockVector<F>, alpha: usize, k: i64) -> Result<FockVector<F>> {
    apply_hamiltonian(v, alpha, &[(k, F::one())])
}

fn apply_hamiltonian<F: Field>(v: &FockVector<F>, alpha: usize, terms: &[(i64, F)]) -> Result<FockVector<F>> {
    let w = v.window();
    let m = w.levels() as i64;
    let mut out = FockVector::zero(w);
    for (k, c) in terms {
        if c.is_zero() {
            continue;
        }
        for n in -m..m {
            if !w.contains(n + k) {
                continue;
            }
            v.hop_into(&mut out, w.bit(alpha, n)?, w.bit(alpha, n + k)?, c);
        }
    }
    Ok(out)
}

/// `exp(sum_k t_k H^(alpha)_k) v` with `t[0] = t_1`.
pub fn apply_exp_h<F: Field>(v: &FockVector<F>, alpha: usize, t: &[F], order: usize) -> Result<FockVector<F>> {
    let terms: Vec<(i64, F)> = t.iter().enumerate().map(|(i, c)| (i as i64 + 1, c.clone())).collect();
    exp_hamiltonian(v, alpha, &terms, order)
}

/// `exp(sum_k tbar_k H^(alpha)_{-k}) v`. On bra coefficients this is also
/// the right action of `exp(sum_k t_k H_k)`, since `H_k^T = H_{-k}`.
pub fn apply_exp_hbar<F: Field>(v: &FockVector<F>, alpha: usize, tbar: &[F], order: usize) -> Result<FockVector<F>> {
    let terms: Vec<(i64, F)> = tbar.iter().enumerate().map(|(i, c)| (-(i as i64) - 1, c.clone())).collect();
    exp_hamiltonian(v, alpha, &terms, order)
}

fn exp_hamiltonian<F: Field>(
    v: &FockVector<F>,
    alpha: usize,
    terms: &[(i64, F)],
    order: usize,
) -> Result<FockVector<F>> {
    if terms.iter().all(|(_, c)| c.is_zero()) {
        return Ok(v.clone());
    }
    exp_series(v, order, "exp of Hamiltonians", |u| apply_hamiltonian(u, alpha, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::vacua::charged_vacuum;
    use crate::fock::vev;
    use crate::numerics::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn one(m: usize) -> ModeWindow {
        ModeWindow::new(1, m).unwrap()
    }

    #[test]
    fn field_examples() {
        let w = ModeWindow::new(2, 3).unwrap();
        let vac = FockVector::<Rational>::vacuum(w);
        let bra1 = charged_vacuum(&[1, 0], w).unwrap();
        for x in [r(0), r(5), q(-2, 3)] {
            let ket = apply_field_f(&vac, 1, &x, 3).unwrap();
            assert_eq!(vev(&bra1, &ket).unwrap(), r(1));
        }
        let bra2 = charged_vacuum(&[2, 0], w).unwrap();
        let (x1, x2) = (r(7), q(1, 2));
        let ket = apply_field_f(&apply_field_f(&vac, 1, &x2, 3).unwrap(), 1, &x1, 3).unwrap();
        assert_eq!(vev(&bra2, &ket).unwrap(), x1 - x2);
    }

    #[test]
    fn free_two_point_functions() {
        let m = 4;
        let w = one(m);
        let vac = FockVector::<Rational>::vacuum(w);
        let (x, y) = (r(3), q(1, 2));
        // <0| f(x) fbar(y) |0>
        let ket = apply_field_f(&apply_field_fbar(&vac, 1, &y, m).unwrap(), 1, &x, m).unwrap();
        let expected = (1..=m as i64).fold(r(0), |acc, k| acc + x.pow_int(-k).unwrap() * y.pow_int(k - 1).unwrap());
        assert_eq!(vev(&vac, &ket).unwrap(), expected);
        // <0| fbar(y) f(x) |0>
        let ket = apply_field_fbar(&apply_field_f(&vac, 1, &x, m).unwrap(), 1, &y, m).unwrap();
        let expected = (0..m as i64).fold(r(0), |acc, k| acc + x.pow_int(k).unwrap() * y.pow_int(-k - 1).unwrap());
        assert_eq!(vev(&vac, &ket).unwrap(), expected);
    }

    #[test]
    fn zero_argument_needing_inverse_powers_is_an_error() {
        let vac = FockVector::<Rational>::vacuum(one(2));
        // on the vacuum only nonnegative powers can act
        assert_eq!(apply_field_f(&vac, 1, &r(0), 2).unwrap(), vac.apply_f(1, 0).unwrap());
        assert!(apply_field_fbar(&vac, 1, &r(0), 2).is_ok());
        let hole = vac.apply_fbar(1, -1).unwrap();
        assert!(matches!(apply_field_f(&hole, 1, &r(0), 2), Err(Error::ZeroSupport(_))));
        let particle = vac.apply_f(1, 0).unwrap();
        assert!(matches!(apply_field_fbar(&particle, 1, &r(0), 2), Err(Error::ZeroSupport(_))));
        assert!(apply_field_f(&vac, 1, &r(1), 3).is_err());
    }

    #[test]
    fn coupling_operator_examples() {
        let w = ModeWindow::new(2, 2).unwrap();
        let vac = FockVector::<Rational>::vacuum(w);
        let mu = DiscreteMeasure::from_ints(1, &[(2, 3, 5)]).unwrap();
        let a = apply_a(&vac, &mu, 1, 2).unwrap();
        assert_eq!(vev(&charged_vacuum(&[0, 0], w).unwrap(), &a).unwrap(), r(0));
        // moving f^(1) past f^(2) in the bra costs a sign
        assert_eq!(vev(&charged_vacuum(&[1, -1], w).unwrap(), &a).unwrap(), r(-5));
        let aa = apply_a(&a, &mu, 1, 2).unwrap();
        assert!(aa.is_zero());
    }

    #[test]
    fn transposed_coupling_operator() {
        let w = ModeWindow::new(2, 2).unwrap();
        let mu = DiscreteMeasure::from_ints(1, &[(2, 3, 5), (-1, 4, 2)]).unwrap();
        let bra = charged_vacuum::<Rational>(&[1, -1], w).unwrap();
        let ket = charged_vacuum::<Rational>(&[-1, 1], w).unwrap();
        // <bra| A (A |ket>) = (A^T <bra|) |A ket>
        let left = vev(&bra, &apply_a(&apply_a(&ket, &mu, 1, 2).unwrap(), &mu, 1, 2).unwrap()).unwrap();
        let right = vev(&apply_a_transposed(&bra, &mu, 1, 2).unwrap(), &apply_a(&ket, &mu, 1, 2).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_ne!(left, r(0));
    }

    #[test]
    fn nilpotent_bilinear_series() {
        let w = one(2);
        let vac = FockVector::<Rational>::vacuum(w);
        let c = q(3, 7);
        let h = BilinearSpec::new(1, vec![(0, -1, c.clone())]).unwrap();
        let g = apply_exp_bilinear(&vac, &h, 2).unwrap();
        let mut expected = vac.clone();
        expected.add_scaled(&vac.apply_fbar(1, -1).unwrap().apply_f(1, 0).unwrap(), &c).unwrap();
        assert_eq!(g, expected);
        let id = apply_exp_bilinear(&vac, &BilinearSpec::identity(1), 0).unwrap();
        assert_eq!(id, vac);
    }

    #[test]
    fn nonterminating_series_is_reported() {
        let w = one(2);
        let vac = FockVector::<Rational>::vacuum(w);
        let h = BilinearSpec::new(1, vec![(-1, -1, r(1))]).unwrap();
        assert!(matches!(apply_exp_bilinear(&vac, &h, 5), Err(Error::NotConverged { .. })));
        let float = FockVector::<f64>::vacuum(w);
        let hf = BilinearSpec::new(1, vec![(-1, -1, 1.0)]).unwrap();
        let g = apply_exp_bilinear(&float, &hf, 40).unwrap();
        assert!((g.amplitude(&w.vacuum()) - 1f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_examples() {
        let w = ModeWindow::new(2, 3).unwrap();
        let vac = FockVector::<Rational>::vacuum(w);
        for k in [-2, -1, 1, 2] {
            assert_eq!(vev(&vac, &apply_h(&vac, 1, k).unwrap()).unwrap(), r(0));
        }
        assert!(apply_h(&vac, 2, 1).unwrap().is_zero());
        assert_eq!(apply_exp_h(&vac, 1, &[r(0)], 0).unwrap(), vac);
    }

    #[test]
    fn deformed_single_field() {
        // <1| e^{t H_1} f(x) |0> = e^{x t}: compare Taylor coefficients
        let m = 6;
        let w = one(m);
        let vac = FockVector::<Rational>::vacuum(w);
        let (x, t) = (q(1, 2), q(1, 10));
        let ket = apply_field_f(&vac, 1, &x, m).unwrap();
        let bra = apply_exp_hbar(&charged_vacuum(&[1], w).unwrap(), 1, std::slice::from_ref(&t), 40).unwrap();
        let got = vev(&bra, &ket).unwrap();
        // the window keeps x^k t^k / k! for k < M, exactly
        let expected = (0..m as i64).fold(r(0), |acc, k| {
            let fact: i64 = (1..=k).product();
            acc + (x.clone() * &t).pow_int(k).unwrap() * q(1, fact)
        });
        assert_eq!(got, expected);
    }

    #[test]
    fn transpose_swaps_indices() {
        let h = BilinearSpec::new(2, vec![(1, -2, r(3))]).unwrap();
        assert_eq!(transpose_bilinear(&h).terms(), &[(-2, 1, r(3))]);
    }
}
