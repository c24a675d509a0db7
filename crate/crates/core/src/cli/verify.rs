use serde::Serialize;
use serde_json::json;

use super::commands::{values_agree, Timings};
use super::config::RunConfig;
use super::{Outcome, Status};
use crate::chain_eval::{chained_moment_matrix, z_bruteforce, z_bruteforce_desym, z_det};
use crate::ensemble::ChainSpec;
use crate::error::{Error, Result};
use crate::family::{fock_family, random_nilpotent, rng, route_family, small_rational, to_float};
use crate::fock::{
    charged_vacuum_ket, check_kernels, rho_from_g, sandwich_vev, z_fock, z_fock_unchecked, FockOptions, ModeWindow,
};
use crate::numerics::{factorial, Field, Matrix, Rational};

/// Outcome of one identity checked over many cases.
#[derive(Debug, Clone, Serialize)]
pub struct Suite {
    pub name: &'static str,
    pub identity: &'static str,
    pub checked: usize,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str, identity: &'static str) -> Self {
        Self { name, identity, checked: 0, passed: true, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.passed = false;
            self.failures.push(what());
        }
    }

    fn record_result<T>(&mut self, r: Result<T>, label: impl Fn() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.record(false, || format!("{}: {e}", label()));
                None
            }
        }
    }
}

fn routes_on<F: Field>(suite: &mut Suite, c: &ChainSpec<F>, label: &str) {
    let brute = suite.record_result(z_bruteforce(c), || format!("{label} enumeration"));
    let desym = suite.record_result(z_bruteforce_desym(c), || format!("{label} desymmetrised"));
    let det = suite.record_result(z_det(c), || format!("{label} determinant"));
    if let (Some(b), Some(s), Some(d)) = (brute, desym, det) {
        suite.record(values_agree(&b, &d) && values_agree(&b, &s), || {
            format!("{label}: enumeration {b}, desymmetrised {s}, determinant {d}")
        });
    }
}

fn config_chain<F: Field>(cfg: &RunConfig, suite: &mut Suite) {
    let Some(c) = suite.record_result(cfg.chain::<F>(), || "configured chain".into()) else { return };
    routes_on(suite, &c, "configured chain");
    let Some(opts) = cfg.fock_options() else { return };
    let Some(gspecs) = suite.record_result(cfg.gspecs::<F>(), || "configured bilinears".into()) else { return };
    match check_kernels(&c, &gspecs, &opts) {
        Err(Error::KernelMismatch { alpha, i, j }) => suite.record(false, || {
            format!("configured chain: kernel rho_{alpha} table entry (i = {i}, j = {j}) disagrees with its bilinear")
        }),
        Err(e) => suite.record(false, || format!("configured chain: {e}")),
        Ok(()) => {
            let fock = suite.record_result(z_fock(&c, &gspecs, &opts), || "configured chain fermionic".into());
            let det = z_det(&c).ok();
            if let (Some(f), Some(d)) = (fock, det) {
                suite.record(values_agree(&f, &d), || format!("configured chain: fermionic {f}, determinant {d}"));
            }
        }
    }
}

fn route_suite(cfg: &RunConfig, seed: u64, count: usize) -> Result<Suite> {
    let mut suite = Suite::new("route_equality", "enumeration = desymmetrised enumeration = moment determinant");
    if cfg.has_chain() {
        match cfg.mode() {
            crate::Mode::Exact => config_chain::<Rational>(cfg, &mut suite),
            crate::Mode::Float => config_chain::<f64>(cfg, &mut suite),
        }
    }
    for (k, c) in route_family(seed, count)?.iter().enumerate() {
        routes_on(&mut suite, c, &format!("family chain {k}"));
    }
    Ok(suite)
}

fn fock_suite(seed: u64, count: usize) -> Result<(Suite, Suite)> {
    let mut routes = Suite::new("fermionic_route", "fermionic expectation value = moment determinant");
    let mut doubling = Suite::new("window_doubling", "fermionic value unchanged when the window doubles");
    for (k, case) in fock_family(seed, count)?.iter().enumerate() {
        let label = || format!("fock chain {k}");
        let z = routes.record_result(z_fock(&case.chain, &case.gspecs, &case.opts), label);
        let d = routes.record_result(z_det(&case.chain), label);
        if let (Some(z), Some(d)) = (&z, d) {
            routes.record(*z == d, || format!("fock chain {k}: fermionic {z}, determinant {d}"));
        }
        let wide = FockOptions { levels: 2 * case.opts.levels, ..case.opts };
        let w = doubling.record_result(z_fock_unchecked(&case.chain, &case.gspecs, &wide), label);
        if let (Some(z), Some(w)) = (z, w) {
            doubling.record(z == w, || {
                format!("fock chain {k}: M = {} gives {z}, M = {} gives {w}", case.opts.levels, wide.levels)
            });
        }
    }
    Ok((routes, doubling))
}

fn wick_suite(seed: u64, count: usize) -> Suite {
    let mut suite = Suite::new("wick", "two-sided field string around g = det of single-pair values");
    let opts = FockOptions::new(5, 5);
    let mut r = rng(seed ^ 0x77);
    for k in 0..count {
        let h = random_nilpotent(&mut r, 1);
        for n in 1..=3usize {
            let mut pts: Vec<Rational> = Vec::new();
            while pts.len() < 2 * n {
                let v = small_rational(&mut r, true);
                if !pts.contains(&v) {
                    pts.push(v);
                }
            }
            let (xs, ys) = pts.split_at(n);
            let lhs = suite.record_result(sandwich_vev(&h, ys, xs, &opts), || format!("case {k}, N = {n}"));
            let m = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| rho_from_g(&h, &ys[i], &xs[j], &opts))
                .collect::<Result<Vec<_>>>()
                .and_then(|v| Matrix::new(n, n, v))
                .and_then(|m| m.det());
            let rhs = suite.record_result(m, || format!("case {k}, N = {n}"));
            if let (Some(a), Some(b)) = (lhs, rhs) {
                suite.record(a == b, || format!("case {k}, N = {n}: string {a}, determinant {b}"));
            }
        }
    }
    suite
}

fn vacuum_suite() -> Result<Suite> {
    let mut suite = Suite::new("vacuum_rules", "f_m kills |n> for m < n, fbar_m kills |n> for m >= n");
    let w = ModeWindow::new(2, 4)?;
    for alpha in 1..=2usize {
        for n in -2i64..=2 {
            let mut charges = vec![0i64; 2];
            charges[alpha - 1] = n;
            charges[2 - alpha] = -n;
            let v = charged_vacuum_ket::<Rational>(&charges, w)?;
            for m in -4i64..4 {
                let f = v.apply_f(alpha, m)?;
                let fb = v.apply_fbar(alpha, m)?;
                suite.record(f.is_zero() == (m < n), || format!("f_{m} on component {alpha} with charge {n}"));
                suite.record(fb.is_zero() == (m >= n), || format!("fbar_{m} on component {alpha} with charge {n}"));
            }
        }
    }
    Ok(suite)
}

/// `(N!)^{p-1}` times the product of the row norms of the float moment
/// matrix: the scale float round-off is measured against.
fn hadamard_bound(c: &ChainSpec<f64>) -> Result<f64> {
    let g = chained_moment_matrix(c)?;
    let rows: f64 = (0..g.rows()).map(|i| g.row(i).iter().map(|v| v * v).sum::<f64>().sqrt()).product();
    Ok(f64::from_bigint(&factorial(c.n())).powi(c.p() as i32 - 1) * rows)
}

fn float_suite(seed: u64, count: usize) -> Result<Suite> {
    let mut suite = Suite::new("exact_vs_float", "float determinant within 1e-10 of the exact value");
    for (k, c) in route_family(seed ^ 0xf10a7, count)?.iter().enumerate() {
        let f = to_float(c);
        let exact = z_det(c)?.to_f64();
        let float = z_det(&f)?;
        let tol = 1e-10 * hadamard_bound(&f)?;
        suite.record((exact - float).abs() <= tol, || format!("family chain {k}: exact {exact}, float {float}"));
    }
    Ok(suite)
}

pub(crate) fn verify(cfg: &RunConfig, timings: &mut Timings) -> Result<Outcome> {
    let seed = cfg.seed();
    let vc = cfg.verify.clone().unwrap_or_default();
    let mut suites = Vec::new();
    suites.push(timings.time("route_equality", || route_suite(cfg, seed, vc.chains))?);
    let (routes, doubling) = timings.time("fermionic_route", || fock_suite(seed, vc.fock_chains))?;
    suites.push(routes);
    suites.push(doubling);
    suites.push(timings.time("wick", || wick_suite(seed, vc.wick_cases)));
    suites.push(timings.time("vacuum_rules", vacuum_suite)?);
    suites.push(timings.time("exact_vs_float", || float_suite(seed, vc.chains))?);
    let passed = suites.iter().all(|s| s.passed);
    let status = if passed { Status::Ok } else { Status::Failed };
    Ok(Outcome::new(json!({ "passed": passed, "suites": suites }), status))
}
