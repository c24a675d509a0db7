//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! `cargo test --test acceptance` (add `--release` for representative
//! timings; the test profile is already optimised).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use taumodel::chain_eval::{z_bruteforce, z_bruteforce_desym, z_det, z_loop_bruteforce};
use taumodel::cli::RunConfig;
use taumodel::ensemble::{
    eval_v, eval_v_inverse, BilinearSpec, BivariatePolynomial, ChainSpec, CouplingKernel, TimeDeformation,
};
use taumodel::family::{
    fock_family, positive_float_chain, random_measure, random_nilpotent, rng, route_family, small_rational, tau_family,
};
use taumodel::fock::{
    apply_exp_bilinear, apply_exp_hbar, apply_field_f, apply_field_fbar, charged_vacuum, charged_vacuum_ket,
    rho_from_g, vev, z_fock, z_fock_unchecked, FockOptions, FockVector, ModeWindow, Pattern,
};
use taumodel::numerics::{vandermonde, Field, Matrix, Rational};
use taumodel::tau::{a_factor, tau_eval, tau_eval_fock, toda_check, DeformedChain};

const ROUTE_CHAINS: usize = 200;
const ROUTE_BUDGET: Duration = Duration::from_secs(60);
const FOCK_CHAINS: usize = 30;
const FOCK_BUDGET: Duration = Duration::from_secs(120);
const TAU_INSTANCES: usize = 10;
const TAU_TOL: f64 = 1e-10;
const TODA_CHAINS: u64 = 5;
const TODA_H: f64 = 1e-3;
const TODA_TOL: f64 = 1e-4;
const TODA_ORDER_H: f64 = 4e-2;
const TODA_RATIO: std::ops::Range<f64> = 3.5..4.5;
const TODA_BUDGET: Duration = Duration::from_secs(30);
const DET_BUDGET: Duration = Duration::from_millis(50);
const SPEEDUP: f64 = 100.0;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<f64, String> {
    let s = start.elapsed().as_secs_f64();
    ensure(start.elapsed() <= budget, || format!("took {s:.2} s, budget {} s", budget.as_secs()))?;
    Ok(s)
}

fn route_equality() -> Check {
    let start = Instant::now();
    let family = route_family(1, ROUTE_CHAINS).map_err(|e| e.to_string())?;
    family.par_iter().enumerate().try_for_each(|(k, c)| {
        let (b, d) = (z_bruteforce(c), z_det(c));
        match (b, d) {
            (Ok(b), Ok(d)) if b == d => Ok(()),
            (b, d) => Err(format!("chain {k} (p = {}, N = {}): enumeration {b:?}, determinant {d:?}", c.p(), c.n())),
        }
    })?;
    let s = within(start, ROUTE_BUDGET)?;
    Ok(format!("{ROUTE_CHAINS} chains, p in 2..=4, N in 0..=3, exact equality, {s:.2} s"))
}

fn desymmetrisation() -> Check {
    let family = route_family(1, ROUTE_CHAINS).map_err(|e| e.to_string())?;
    family.par_iter().enumerate().try_for_each(|(k, c)| match (z_bruteforce(c), z_bruteforce_desym(c)) {
        (Ok(b), Ok(s)) if b == s => Ok(()),
        (b, s) => Err(format!("chain {k}: enumeration {b:?}, desymmetrised {s:?}")),
    })?;
    Ok(format!("{ROUTE_CHAINS} chains, exact equality"))
}

fn fermionic_oracle() -> Check {
    let start = Instant::now();
    let family = fock_family(2, FOCK_CHAINS).map_err(|e| e.to_string())?;
    let max_levels = family.iter().map(|c| c.opts.levels).max().unwrap_or(0);
    ensure(max_levels <= 6, || format!("window M = {max_levels} exceeds 6"))?;
    family.par_iter().enumerate().try_for_each(|(k, case)| {
        let e = |e: taumodel::Error| format!("chain {k}: {e}");
        let z = z_fock(&case.chain, &case.gspecs, &case.opts).map_err(e)?;
        let b = z_bruteforce(&case.chain).map_err(e)?;
        ensure(z == b, || format!("chain {k}: fermionic {z}, enumeration {b}"))?;
        let wide = FockOptions { levels: 2 * case.opts.levels, ..case.opts };
        let w = z_fock_unchecked(&case.chain, &case.gspecs, &wide).map_err(e)?;
        ensure(w == z, || format!("chain {k}: M = {} gives {z}, M = {} gives {w}", case.opts.levels, wide.levels))
    })?;
    let s = within(start, FOCK_BUDGET)?;
    Ok(format!("{FOCK_CHAINS} chains, M = {max_levels}, exact equality, doubling stable, {s:.2} s"))
}

fn pairwise_product(xs: &[Rational]) -> Rational {
    let mut acc = Rational::one();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            acc *= &(xs[i].clone() - &xs[j]);
        }
    }
    acc
}

fn distinct(r: &mut impl Rng, n: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    while out.len() < n {
        let v = small_rational(r, true);
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn anticommutators(checked: &mut usize) -> Result<(), String> {
    let w = ModeWindow::new(2, 2).map_err(|e| e.to_string())?;
    let ops: Vec<(bool, usize, i64)> =
        [false, true].iter().flat_map(|&d| (1..=2).flat_map(move |a| (-2i64..2).map(move |n| (d, a, n)))).collect();
    let apply =
        |v: &FockVector<Rational>, (d, a, n): (bool, usize, i64)| if d { v.apply_f(a, n) } else { v.apply_fbar(a, n) };
    for bits in 0..1u32 << w.modes() {
        let mut pat = Pattern::EMPTY;
        (0..w.modes()).filter(|b| bits >> b & 1 == 1).for_each(|b| pat.set(b));
        let v = FockVector::<Rational>::basis(w, pat);
        for &a in &ops {
            for &b in &ops {
                let mut sum = apply(&apply(&v, b).map_err(|e| e.to_string())?, a).map_err(|e| e.to_string())?;
                let other = apply(&apply(&v, a).map_err(|e| e.to_string())?, b).map_err(|e| e.to_string())?;
                sum.add_scaled(&other, &Rational::one()).map_err(|e| e.to_string())?;
                let expect = if a.0 != b.0 && a.1 == b.1 && a.2 == b.2 { v.clone() } else { FockVector::zero(w) };
                ensure(sum == expect, || format!("anticommutator of {a:?} and {b:?} on pattern {bits:#b}"))?;
                *checked += 1;
            }
        }
    }
    Ok(())
}

fn vacuum_rules(checked: &mut usize) -> Result<(), String> {
    let w = ModeWindow::new(2, 4).map_err(|e| e.to_string())?;
    for alpha in 1..=2usize {
        for n in -2i64..=2 {
            let mut charges = vec![0i64; 2];
            charges[alpha - 1] = n;
            charges[2 - alpha] = -n;
            let v = charged_vacuum_ket::<Rational>(&charges, w).map_err(|e| e.to_string())?;
            for m in -4i64..4 {
                let f = v.apply_f(alpha, m).map_err(|e| e.to_string())?;
                let fb = v.apply_fbar(alpha, m).map_err(|e| e.to_string())?;
                ensure(f.is_zero() == (m < n), || format!("f_{m} on component {alpha}, charge {n}"))?;
                ensure(fb.is_zero() == (m >= n), || format!("fbar_{m} on component {alpha}, charge {n}"))?;
                *checked += 2;
            }
        }
    }
    Ok(())
}

fn field_string(charge: i64, zs: &[Rational], barred: bool, levels: usize) -> taumodel::Result<Rational> {
    let w = ModeWindow::new(1, levels)?;
    let mut ket = FockVector::vacuum(w);
    for z in zs.iter().rev() {
        ket = if barred { apply_field_fbar(&ket, 1, z, levels)? } else { apply_field_f(&ket, 1, z, levels)? };
    }
    vev(&charged_vacuum(&[charge], w)?, &ket)
}

fn vandermonde_strings(checked: &mut usize) -> Result<(), String> {
    let mut r = rng(4);
    for n in 0..=3usize {
        for _ in 0..4 {
            let xs = distinct(&mut r, n);
            let expect = pairwise_product(&xs);
            let left = field_string(n as i64, &xs, false, 4).map_err(|e| e.to_string())?;
            let right = field_string(-(n as i64), &xs, true, 4).map_err(|e| e.to_string())?;
            ensure(left == expect, || format!("f-string on {xs:?}: {left} vs {expect}"))?;
            ensure(right == expect, || format!("fbar-string on {xs:?}: {right} vs {expect}"))?;
            *checked += 2;
        }
    }
    Ok(())
}

fn wick(checked: &mut usize) -> Result<(), String> {
    let opts = FockOptions::new(5, 5);
    let w = ModeWindow::new(1, opts.levels).map_err(|e| e.to_string())?;
    let mut r = rng(5);
    for case in 0..8 {
        let h: BilinearSpec<Rational> = random_nilpotent(&mut r, 1);
        for n in 1..=3usize {
            let pts = distinct(&mut r, 2 * n);
            let (xs, ys) = pts.split_at(n);
            let lhs = (|| {
                let mut ket = FockVector::vacuum(w);
                for x in xs {
                    ket = apply_field_f(&ket, 1, x, opts.cutoff)?;
                }
                ket = apply_exp_bilinear(&ket, &h, opts.order)?;
                for y in ys.iter().rev() {
                    ket = apply_field_fbar(&ket, 1, y, opts.cutoff)?;
                }
                vev(&FockVector::vacuum(w), &ket)
            })()
            .map_err(|e| e.to_string())?;
            let rhs = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| rho_from_g(&h, &ys[i], &xs[j], &opts))
                .collect::<taumodel::Result<Vec<_>>>()
                .and_then(|v| Matrix::new(n, n, v))
                .and_then(|m| m.det())
                .map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || format!("case {case}, N = {n}: string {lhs}, determinant {rhs}"))?;
            *checked += 1;
        }
    }
    Ok(())
}

fn fock_identities() -> Check {
    let mut counts = [0usize; 4];
    anticommutators(&mut counts[0])?;
    vacuum_rules(&mut counts[1])?;
    vandermonde_strings(&mut counts[2])?;
    wick(&mut counts[3])?;
    Ok(format!(
        "exact: {} anticommutators, {} vacuum rules, {} Vandermonde strings, {} Wick determinants",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

/// `<N| e^{H(t)} f(x_1) ... f(x_N) e^{Hbar(tbar)} |0>` on one component.
fn deformed_fields(xs: &[f64], t: &[f64], tbar: &[f64], opts: &FockOptions) -> taumodel::Result<f64> {
    let w = ModeWindow::new(1, opts.levels)?;
    let mut ket = apply_exp_hbar(&charged_vacuum(&[0], w)?, 1, tbar, opts.order)?;
    for x in xs.iter().rev() {
        ket = apply_field_f(&ket, 1, x, opts.cutoff)?;
    }
    let bra = apply_exp_hbar(&charged_vacuum(&[xs.len() as i64], w)?, 1, t, opts.order)?;
    vev(&bra, &ket)
}

fn deformation_equivalence() -> Check {
    let family = tau_family(6, TAU_INSTANCES).map_err(|e| e.to_string())?;
    let worst = family
        .par_iter()
        .enumerate()
        .map(|(k, d)| {
            let a = tau_eval(d).map_err(|e| format!("instance {k}: {e}"))?;
            let b = tau_eval_fock(d).map_err(|e| format!("instance {k}: {e}"))?;
            let rel = (a - b).abs() / a.abs();
            ensure(rel <= TAU_TOL, || format!("instance {k}: {a} vs {b}, relative {rel:.2e}"))?;
            Ok(rel)
        })
        .collect::<Result<Vec<f64>, String>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let opts = FockOptions::new(20, 20);
    let (t, tbar) = (vec![0.1, -0.03, 0.01], vec![0.06, 0.02, -0.01]);
    let mut vworst = 0.0f64;
    for xs in [vec![1.3], vec![0.8, 1.5], vec![1.2, 0.7, 1.4]] {
        let plain = vandermonde(&xs, xs.len() as i64).map_err(|e| e.to_string())?;
        let weights: f64 = xs
            .iter()
            .map(|x| Ok((eval_v(x, &t) - eval_v_inverse(x, &tbar)?).exp()))
            .collect::<taumodel::Result<Vec<f64>>>()
            .map_err(|e| e.to_string())?
            .iter()
            .product();
        let expect = a_factor(&t, &tbar).map_err(|e| e.to_string())? * plain * weights;
        let got = deformed_fields(&xs, &t, &tbar, &opts).map_err(|e| e.to_string())?;
        let rel = ((got - expect) / expect).abs();
        ensure(rel <= TAU_TOL, || format!("deformed Vandermonde at {xs:?}: {got} vs {expect}"))?;
        vworst = vworst.max(rel);
    }
    Ok(format!(
        "{TAU_INSTANCES} instances, worst relative {worst:.1e}; deformed Vandermonde with times to order 3, worst {vworst:.1e}"
    ))
}

fn toda_chain(seed: u64, n: usize) -> taumodel::Result<DeformedChain<f64>> {
    let mut r = rng(seed);
    let measures = positive_float_chain(&mut r, 2, n + 2)?;
    let c = ChainSpec::new(2, n, measures, vec![])?;
    DeformedChain::new(c, TimeDeformation::zero(2), FockOptions::new(4, 4))
}

fn toda() -> Check {
    let start = Instant::now();
    let chains: Vec<DeformedChain<f64>> = (0..TODA_CHAINS)
        .map(|s| toda_chain(100 + s, 1 + s as usize % 2))
        .collect::<taumodel::Result<_>>()
        .map_err(|e| e.to_string())?;
    let reports = chains
        .par_iter()
        .map(|d| Ok((toda_check(d, TODA_H)?, toda_check(d, TODA_ORDER_H)?, toda_check(d, TODA_ORDER_H / 2.0)?)))
        .collect::<taumodel::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let eps = reports[0].0.best_sign();
    let mut worst = 0.0f64;
    let mut ratios = Vec::new();
    for (k, (r, coarse, fine)) in reports.iter().enumerate() {
        let res = r.residual(eps);
        ensure(res <= TODA_TOL, || format!("chain {k}: residual {res:.2e} with sign {eps}"))?;
        worst = worst.max(res);
        let q = coarse.residual(eps) / fine.residual(eps);
        ensure(TODA_RATIO.contains(&q), || {
            format!("chain {k}: halving h = {TODA_ORDER_H} shrinks the residual by {q:.2}")
        })?;
        ratios.push(q);
    }
    let s = within(start, TODA_BUDGET)?;
    let (lo, hi) = ratios.iter().fold((f64::MAX, f64::MIN), |(a, b), &q| (a.min(q), b.max(q)));
    Ok(format!(
        "{TODA_CHAINS} chains, sign {eps}, worst residual {worst:.1e} at h = {TODA_H}, halving ratio {lo:.2}..{hi:.2}, {s:.2} s"
    ))
}

fn closed_chain() -> Check {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/loop60.json");
    let mut cfg = RunConfig::from_file(&path).map_err(|e| e.to_string())?;
    let c = cfg.closed_chain::<Rational>().map_err(|e| e.to_string())?;
    let z = z_loop_bruteforce(&c).map_err(|e| e.to_string())?;
    ensure(z == Rational::from_i64(60), || format!("fixture gives {z}, expected 60"))?;
    cfg.n = 0;
    let z0 =
        z_loop_bruteforce(&cfg.closed_chain::<Rational>().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(z0 == Rational::one(), || format!("N = 0 gives {z0}"))?;
    Ok("fixture value 60, N = 0 gives 1".into())
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

fn performance() -> Check {
    let mut r = rng(8);
    // diagonal terms 1, yx, y^2 x^2 give the kernel rank 3, so Z_3 is nonzero
    let kernel = BivariatePolynomial::new((0..3).map(|d| (d, d, small_rational(&mut r, true))).collect());
    let measures = (1..3).map(|a| random_measure(&mut r, a, 4, true)).collect::<taumodel::Result<Vec<_>>>();
    let c = measures
        .and_then(|m| ChainSpec::new(3, 3, m, vec![CouplingKernel::Polynomial(kernel)]))
        .map_err(|e| e.to_string())?;
    let mut det = Vec::new();
    let mut value = None;
    for _ in 0..7 {
        let start = Instant::now();
        value = Some(z_det(&c).map_err(|e| e.to_string())?);
        det.push(start.elapsed());
    }
    let det = median(det);
    let start = Instant::now();
    let brute = z_bruteforce(&c).map_err(|e| e.to_string())?;
    let brute_time = start.elapsed();
    ensure(value.as_ref() == Some(&brute), || "routes disagree on the timing chain".into())?;
    ensure(!brute.is_zero(), || "timing chain has Z = 0".into())?;
    ensure(det <= DET_BUDGET, || format!("determinant took {det:?}, budget {DET_BUDGET:?}"))?;
    let speedup = brute_time.as_secs_f64() / det.as_secs_f64().max(1e-9);
    ensure(speedup >= SPEEDUP, || format!("enumeration only {speedup:.0}x slower ({brute_time:?} vs {det:?})"))?;
    Ok(format!("p = 3, N = 3, 4 atoms: determinant {det:.2?}, enumeration {brute_time:.2?} ({speedup:.0}x)"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("route equality", route_equality),
        ("desymmetrisation", desymmetrisation),
        ("fermionic oracle", fermionic_oracle),
        ("fermionic identities", fock_identities),
        ("deformation equivalence", deformation_equivalence),
        ("toda residual", toda),
        ("closed chain", closed_chain),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(msg) => println!("PASS {} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
