use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::{json, Value};

use super::config::{Route, RunConfig, TodaConfig};
use super::{Outcome, Status};
use crate::chain_eval::{chained_moment_matrix, z_bruteforce, z_bruteforce_desym, z_det, z_loop_bruteforce};
use crate::ensemble::ChainSpec;
use crate::error::{Error, Mode, Result};
use crate::fock::{z_fock, FockOptions};
use crate::numerics::Field;
use crate::tau::{kernel_miwa_check, tau_eval, tau_eval_fock, toda_check, DeformedChain, TodaReport};

/// Relative agreement demanded between float routes.
pub const FLOAT_ROUTE_TOL: f64 = 1e-10;

pub(crate) struct Timings(BTreeMap<String, f64>);

impl Timings {
    pub(crate) fn new() -> Self {
        Self(BTreeMap::new())
    }

    pub(crate) fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.insert(name.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }

    pub(crate) fn into_json(self) -> Value {
        json!(self.0)
    }
}

pub(crate) fn values_agree<F: Field>(a: &F, b: &F) -> bool {
    if F::MODE == Mode::Exact {
        a == b
    } else {
        let scale = a.magnitude().max(b.magnitude());
        (a.clone() - b).magnitude() <= FLOAT_ROUTE_TOL * scale
    }
}

fn expand_routes(cfg: &RunConfig) -> Vec<Route> {
    let requested = cfg.routes.clone().unwrap_or_else(|| vec![Route::All]);
    let mut out = Vec::new();
    for r in requested {
        let add: Vec<Route> = if r == Route::All {
            let mut v = vec![Route::Brute, Route::Desym, Route::Det];
            if cfg.fock.is_some() {
                v.push(Route::Fock);
            }
            v
        } else {
            vec![r]
        };
        for a in add {
            if !out.contains(&a) {
                out.push(a);
            }
        }
    }
    out
}

fn fock_options(cfg: &RunConfig) -> Result<FockOptions> {
    cfg.fock_options().ok_or_else(|| Error::Config("the fermionic route needs a `fock` section".into()))
}

fn eval_route<F: Field>(route: Route, c: &ChainSpec<F>, cfg: &RunConfig) -> Result<F> {
    match route {
        Route::Brute => z_bruteforce(c),
        Route::Desym => z_bruteforce_desym(c),
        Route::Det => z_det(c),
        Route::Fock => z_fock(c, &cfg.gspecs()?, &fock_options(cfg)?),
        Route::All => unreachable!("expanded before evaluation"),
    }
}

pub(crate) fn compute<F: Field>(cfg: &RunConfig, timings: &mut Timings) -> Result<Outcome> {
    let c: ChainSpec<F> = cfg.chain()?;
    let mut values = BTreeMap::new();
    let mut errors = BTreeMap::new();
    let mut first: Option<F> = None;
    let mut agree = true;
    for route in expand_routes(cfg) {
        match timings.time(route.name(), || eval_route(route, &c, cfg)) {
            Ok(v) => {
                if let Some(f) = &first {
                    agree &= values_agree(f, &v);
                } else {
                    first = Some(v.clone());
                }
                values.insert(route.name(), v.to_scalar());
            }
            Err(e) => {
                errors.insert(route.name(), e.to_string());
            }
        }
    }
    let mut result = json!({ "p": c.p(), "n": c.n(), "values": values, "agree": agree });
    if !errors.is_empty() {
        result["errors"] = json!(errors);
    }
    if cfg.moment_matrix {
        let g = chained_moment_matrix(&c)?;
        result["moment_matrix"] = json!(g.to_strings());
    }
    let status = if !errors.is_empty() {
        Status::RouteError
    } else if !agree {
        Status::Failed
    } else {
        Status::Ok
    };
    Ok(Outcome::new(result, status))
}

pub(crate) fn run_loop<F: Field>(cfg: &RunConfig, timings: &mut Timings) -> Result<Outcome> {
    let c = cfg.closed_chain::<F>()?;
    let z = timings.time("loop", || z_loop_bruteforce(&c))?;
    Ok(Outcome::new(json!({ "p": c.p(), "n": c.n(), "value": z.to_scalar() }), Status::Ok))
}

pub(crate) fn deform<F: Field>(cfg: &RunConfig, timings: &mut Timings) -> Result<Outcome> {
    let c: ChainSpec<F> = cfg.chain()?;
    let def = cfg.deformation(c.p())?;
    let opts = cfg.fock_options().unwrap_or_else(|| FockOptions::new(12, 12));
    let mut d = DeformedChain::new(c, def, opts)?;
    if cfg.fock.as_ref().is_some_and(|f| !f.gspecs.is_empty()) {
        d = d.with_gspecs(cfg.gspecs()?);
    }
    let tau = timings.time("tau", || tau_eval(&d))?;
    let mut result = json!({
        "p": d.base.p(),
        "n": d.base.n(),
        "deformation": d.deformation,
        "tau": tau.to_scalar(),
    });
    let mut status = Status::Ok;
    if cfg.fock.is_some() {
        let native = timings.time("tau_fock", || tau_eval_fock(&d))?;
        let rel = (tau.clone() - &native).magnitude() / tau.magnitude().max(f64::MIN_POSITIVE);
        result["tau_fock"] = json!(native.to_scalar());
        result["relative_difference"] = json!(rel);
        if rel > FLOAT_ROUTE_TOL {
            status = Status::Failed;
        }
    }
    if let Some(m) = &cfg.miwa {
        let g = crate::ensemble::BilinearSpec::new(1, m.g.clone())?;
        let opts = FockOptions::new(m.levels, m.levels);
        let report =
            timings.time("miwa", || kernel_miwa_check(&g, &m.t, &m.tbar, m.n, &m.xs, &m.ys, m.depth, &opts))?;
        result["miwa"] = json!(report);
    }
    Ok(Outcome::new(result, status))
}

fn toda_row(r: &TodaReport, eps: f64) -> Value {
    json!({ "h": r.h, "d": r.d, "ratio": r.ratio, "residual": r.residual(eps) })
}

pub(crate) fn toda(cfg: &RunConfig, timings: &mut Timings) -> Result<Outcome> {
    if cfg.mode() != Mode::Float {
        return Err(Error::Config("toda runs in float mode; pass --mode float".into()));
    }
    let c: ChainSpec<f64> = cfg.chain()?;
    let def = cfg.deformation(c.p())?;
    let opts = cfg.fock_options().unwrap_or_else(|| FockOptions::new(12, 12));
    let mut d = DeformedChain::new(c, def, opts)?;
    if cfg.fock.as_ref().is_some_and(|f| !f.gspecs.is_empty()) {
        d = d.with_gspecs(cfg.gspecs()?);
    }
    let tc = cfg.toda.clone().unwrap_or_default();
    let TodaConfig { h, order_h } = tc;
    let steps = [h, h / 2.0, order_h, order_h / 2.0];
    let reports = timings.time("stencils", || steps.iter().map(|&s| toda_check(&d, s)).collect::<Result<Vec<_>>>())?;
    let main = &reports[0];
    let eps = main.best_sign();
    let order_ratio = reports[2].residual(eps) / reports[3].residual(eps);
    let result = json!({
        "p": d.base.p(),
        "n": d.base.n(),
        "sign": eps,
        "residual": main.residual(eps),
        "residual_other_sign": main.residual(-eps),
        "taus": { "n_minus_1": main.taus[0], "n": main.taus[1], "n_plus_1": main.taus[2] },
        "table": reports.iter().map(|r| toda_row(r, eps)).collect::<Vec<_>>(),
        "order": {
            "coarse_h": order_h,
            "fine_h": order_h / 2.0,
            "ratio": order_ratio,
            "estimate": order_ratio.log2(),
        },
    });
    Ok(Outcome::new(result, Status::Ok))
}
