//! Seeded random chain families used by the verification suites.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{Atom, BilinearSpec, BivariatePolynomial, ChainSpec, CouplingKernel, DiscreteMeasure};
use crate::error::Result;
use crate::fock::{chain_from_g, FockOptions};
use crate::numerics::{Field, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small rational `a / b` with `|a| <= 4`, `1 <= b <= 3`.
pub fn small_rational(rng: &mut impl Rng, nonzero: bool) -> Rational {
    loop {
        let a: i64 = rng.gen_range(-4..=4);
        if nonzero && a == 0 {
            continue;
        }
        let b: i64 = rng.gen_range(1..=3);
        return Rational::new(BigInt::from(a), BigInt::from(b));
    }
}

pub fn random_measure(
    rng: &mut impl Rng,
    label: usize,
    atoms: usize,
    nonzero: bool,
) -> Result<DiscreteMeasure<Rational>> {
    let atoms = (0..atoms)
        .map(|_| Atom::new(small_rational(rng, nonzero), small_rational(rng, nonzero), small_rational(rng, true)))
        .collect();
    DiscreteMeasure::new(label, atoms)
}

/// Random polynomial kernel of total degree at most `degree`.
pub fn random_polynomial(rng: &mut impl Rng, degree: u32) -> CouplingKernel<Rational> {
    let mut terms = Vec::new();
    for m in 0..=degree {
        for n in 0..=degree - m {
            if rng.gen_bool(0.6) {
                terms.push((m, n, small_rational(rng, true)));
            }
        }
    }
    if terms.is_empty() {
        terms.push((0, 0, Rational::from_i64(1)));
    }
    CouplingKernel::Polynomial(BivariatePolynomial::new(terms))
}

/// Atom count between `max(n, 1)` and `max_atoms`, so the chain is not
/// trivially zero.
fn atom_count(rng: &mut impl Rng, n: usize, max_atoms: usize) -> usize {
    let lo = n.max(1).min(max_atoms);
    rng.gen_range(lo..=max_atoms)
}

pub fn random_chain(
    rng: &mut impl Rng,
    p: usize,
    n: usize,
    max_atoms: usize,
    degree: u32,
) -> Result<ChainSpec<Rational>> {
    let measures = (1..p)
        .map(|a| {
            let k = atom_count(rng, n, max_atoms);
            random_measure(rng, a, k, false)
        })
        .collect::<Result<Vec<_>>>()?;
    let kernels = (2..p).map(|_| random_polynomial(rng, degree)).collect();
    ChainSpec::new(p, n, measures, kernels)
}

/// Route-equality family: `p` in 2..=4, `N` in 0..=3, at most four atoms
/// per measure, polynomial kernels of degree at most two.
pub fn route_family(seed: u64, count: usize) -> Result<Vec<ChainSpec<Rational>>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let p = rng.gen_range(2..=4);
            let n = rng.gen_range(0..=3);
            random_chain(&mut rng, p, n, 4, 2)
        })
        .collect()
}

/// Strictly triangular bilinear on component `alpha` with levels in `-2..2`.
pub fn random_nilpotent(rng: &mut impl Rng, alpha: usize) -> BilinearSpec<Rational> {
    let lower = rng.gen_bool(0.5);
    let mut terms = Vec::new();
    for i in -2i64..2 {
        for j in -2i64..2 {
            if (lower && i > j || !lower && i < j) && rng.gen_bool(0.4) {
                terms.push((i, j, small_rational(rng, true)));
            }
        }
    }
    BilinearSpec::new(alpha, terms).expect("component >= 1")
}

/// One member of the fermionic family: a chain whose kernels come from the
/// accompanying bilinears.
#[derive(Debug, Clone)]
pub struct FockCase {
    pub chain: ChainSpec<Rational>,
    pub gspecs: Vec<BilinearSpec<Rational>>,
    pub opts: FockOptions,
}

/// Fermionic family: `p` in {2, 3}, `N` in {1, 2}, at most three atoms with
/// nonzero coordinates, nilpotent bilinears, `M = 4`, `L = 3`.
pub fn fock_family(seed: u64, count: usize) -> Result<Vec<FockCase>> {
    let mut rng = rng(seed);
    let opts = FockOptions::new(4, 3);
    (0..count)
        .map(|_| {
            let p = rng.gen_range(2..=3);
            let n = rng.gen_range(1..=2);
            let measures = (1..p)
                .map(|a| {
                    let k = atom_count(&mut rng, n, 3);
                    random_measure(&mut rng, a, k, true)
                })
                .collect::<Result<Vec<_>>>()?;
            let gspecs: Vec<_> = (2..p).map(|a| random_nilpotent(&mut rng, a)).collect();
            let chain = chain_from_g(p, n, measures, &gspecs, &opts)?;
            Ok(FockCase { chain, gspecs, opts })
        })
        .collect()
}

/// Float copy of an exact chain.
pub fn to_float(c: &ChainSpec<Rational>) -> ChainSpec<f64> {
    c.map(Field::to_f64)
}

/// Measures for a float chain, coordinates and weights in `[0.5, 2]`.
pub fn positive_float_chain(rng: &mut impl Rng, p: usize, atoms: usize) -> Result<Vec<DiscreteMeasure<f64>>> {
    (1..p)
        .map(|a| {
            let atoms = (0..atoms)
                .map(|_| Atom::new(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)))
                .collect();
            DiscreteMeasure::new(a, atoms)
        })
        .collect()
}

/// Tiny deformed chains for the tau equivalence: `p` in {2, 3}, `N` in
/// {1, 2}, up to three atoms, nilpotent bilinears and one nonzero first
/// time on a random component and side.
pub fn tau_family(seed: u64, count: usize) -> Result<Vec<crate::tau::DeformedChain<f64>>> {
    use crate::ensemble::TimeDeformation;
    let mut rng = rng(seed);
    let opts = FockOptions::new(12, 12);
    (0..count)
        .map(|_| {
            let p = rng.gen_range(2..=3);
            let n = rng.gen_range(1..=2);
            let atoms = rng.gen_range(n..=3);
            let measures = positive_float_chain(&mut rng, p, atoms)?;
            let gspecs: Vec<BilinearSpec<f64>> =
                (2..p).map(|a| random_nilpotent(&mut rng, a).map(|q| q.to_f64() / 4.0)).collect();
            let chain = chain_from_g(p, n, measures, &gspecs, &opts)?;
            let alpha = rng.gen_range(1..=p);
            let value = rng.gen_range(0.05..0.15) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let zero = TimeDeformation::zero(p);
            let deformation =
                if rng.gen_bool(0.5) { zero.with_t(alpha, 1, value) } else { zero.with_tbar(alpha, 1, value) };
            Ok(crate::tau::DeformedChain::new(chain, deformation, opts)?.with_gspecs(gspecs))
        })
        .collect()
}
