use super::vector::FockVector;
use super::window::ModeWindow;
use crate::error::{Error, Result};
use crate::numerics::Field;

/// `|n^(1), ..., n^(p)> = Cbar_{n^(p)} ... Cbar_{n^(1)} |0>` with
/// `Cbar_n = f_{n-1} ... f_0` for `n > 0` and `fbar_n ... fbar_{-1}` for
/// `n < 0`.
///
/// The bra `<0| C_{n^(1)} ... C_{n^(p)}` has the same coefficient vector:
/// transposing `C_n` gives exactly the ket string, applied in the same order,
/// so this also serves as the charged bra.
pub fn charged_vacuum<F: Field>(charges: &[i64], window: ModeWindow) -> Result<FockVector<F>> {
    if charges.len() != window.p() {
        return Err(Error::LengthMismatch { expected: window.p(), got: charges.len() });
    }
    let m = window.levels() as i64;
    let mut v = FockVector::vacuum(window);
    for (a, &n) in charges.iter().enumerate() {
        if n.abs() > m {
            return Err(Error::ChargeExceedsWindow { charge: n, levels: window.levels() });
        }
        if n > 0 {
            for k in 0..n {
                v = v.apply_f(a + 1, k)?;
            }
        } else {
            for k in (n..0).rev() {
                v = v.apply_fbar(a + 1, k)?;
            }
        }
    }
    Ok(v)
}

/// Charged ket, see [`charged_vacuum`].
pub fn charged_vacuum_ket<F: Field>(charges: &[i64], window: ModeWindow) -> Result<FockVector<F>> {
    charged_vacuum(charges, window)
}

/// Charged bra coefficient vector, see [`charged_vacuum`].
pub fn charged_vacuum_bra<F: Field>(charges: &[i64], window: ModeWindow) -> Result<FockVector<F>> {
    charged_vacuum(charges, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::vev;
    use crate::numerics::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    #[test]
    fn charged_vacuum_examples() {
        let w = ModeWindow::new(1, 3).unwrap();
        assert_eq!(charged_vacuum::<Rational>(&[0], w).unwrap(), FockVector::vacuum(w));
        let two = charged_vacuum::<Rational>(&[2], w).unwrap();
        assert_eq!(two.len(), 1);
        let mut pat = w.vacuum();
        pat.set(w.bit(1, 0).unwrap());
        pat.set(w.bit(1, 1).unwrap());
        assert_eq!(two.amplitude(&pat), r(1));
        for n in -3..=3 {
            let ket = charged_vacuum_ket::<Rational>(&[n], w).unwrap();
            let bra = charged_vacuum_bra::<Rational>(&[n], w).unwrap();
            assert_eq!(vev(&bra, &ket).unwrap(), r(1));
        }
        assert!(matches!(charged_vacuum::<Rational>(&[4], w), Err(Error::ChargeExceedsWindow { charge: 4, .. })));
    }

    #[test]
    fn annihilation_rules() {
        let w = ModeWindow::new(2, 4).unwrap();
        for n1 in -2..=2i64 {
            for n2 in -2..=2i64 {
                let v = charged_vacuum::<Rational>(&[n1, n2], w).unwrap();
                for (alpha, n) in [(1, n1), (2, n2)] {
                    for m in -4..4 {
                        assert_eq!(v.apply_f(alpha, m).unwrap().is_zero(), m < n);
                        assert_eq!(v.apply_fbar(alpha, m).unwrap().is_zero(), m >= n);
                    }
                }
            }
        }
    }
}
