//! Run configuration: the JSON schema and its conversion into chains.
//!
//! See `docs/config.md` for the schema with examples.

use serde::Deserialize;

use crate::ensemble::{
    hermitian_chain_preset, Atom, BilinearSpec, BivariatePolynomial, ChainSpec, ClosedChainSpec, CouplingKernel,
    DiscreteMeasure, KernelTable, TimeDeformation,
};
use crate::error::{Error, Mode, Result};
use crate::fock::{chain_from_g, FockOptions};
use crate::numerics::{Field, Matrix, Rational, Scalar};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Number of components; defaults to one more than the number of
    /// measures (or to the number of measures for `loop`).
    pub p: Option<usize>,
    #[serde(default)]
    pub n: usize,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub measures: Vec<MeasureConfig>,
    #[serde(default)]
    pub kernels: Vec<KernelConfig>,
    pub hermitian: Option<HermitianConfig>,
    pub routes: Option<Vec<Route>>,
    #[serde(default)]
    pub moment_matrix: bool,
    pub fock: Option<FockConfig>,
    pub deformation: Option<DeformationConfig>,
    pub miwa: Option<MiwaConfig>,
    pub toda: Option<TodaConfig>,
    pub verify: Option<VerifyConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    /// `[x, y, w]` triples.
    pub atoms: Vec<[Scalar; 3]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelConfig {
    /// `[deg_y, deg_x, coefficient]` terms.
    Polynomial(Vec<(u32, u32, Scalar)>),
    Table(TableConfig),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    pub ys: Vec<Scalar>,
    pub xs: Vec<Scalar>,
    /// `values[i][j]` is the kernel at `(ys[i], xs[j])`.
    pub values: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HermitianConfig {
    pub potentials: Vec<Vec<f64>>,
    pub couplings: Vec<f64>,
    pub grids: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Brute,
    Desym,
    Det,
    Fock,
    All,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Brute => "brute",
            Route::Desym => "desym",
            Route::Det => "det",
            Route::Fock => "fock",
            Route::All => "all",
        }
    }
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown route `{s}` (expected brute|desym|det|fock|all)")))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockConfig {
    pub levels: usize,
    pub cutoff: Option<usize>,
    pub order: Option<usize>,
    #[serde(default)]
    pub check_doubling: bool,
    #[serde(default)]
    pub check_selection: bool,
    /// Bilinears `h_2 .. h_{p-1}` behind the interior kernels.
    #[serde(default)]
    pub gspecs: Vec<GspecConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GspecConfig {
    /// `[i, j, h_ij]` for the term `h_ij f_i fbar_j`.
    pub terms: Vec<(i64, i64, Scalar)>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationConfig {
    #[serde(default)]
    pub t: Vec<Vec<f64>>,
    #[serde(default)]
    pub tbar: Vec<Vec<f64>>,
    #[serde(default)]
    pub charges: Vec<i64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MiwaConfig {
    #[serde(default)]
    pub g: Vec<(i64, i64, f64)>,
    #[serde(default)]
    pub t: Vec<f64>,
    #[serde(default)]
    pub tbar: Vec<f64>,
    #[serde(default)]
    pub n: i64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub depth: usize,
    pub levels: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TodaConfig {
    #[serde(default = "default_h")]
    pub h: f64,
    /// Larger step pair `(order_h, order_h / 2)` for the convergence order.
    #[serde(default = "default_order_h")]
    pub order_h: f64,
}

fn default_h() -> f64 {
    1e-3
}

fn default_order_h() -> f64 {
    4e-2
}

impl Default for TodaConfig {
    fn default() -> Self {
        Self { h: default_h(), order_h: default_order_h() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_chains")]
    pub chains: usize,
    #[serde(default = "default_fock_chains")]
    pub fock_chains: usize,
    #[serde(default = "default_wick_cases")]
    pub wick_cases: usize,
}

fn default_chains() -> usize {
    40
}

fn default_fock_chains() -> usize {
    6
}

fn default_wick_cases() -> usize {
    6
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { chains: default_chains(), fock_chains: default_fock_chains(), wick_cases: default_wick_cases() }
    }
}

impl RunConfig {
    /// Parses JSON text; errors carry serde's line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(Mode::Exact)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Whether the configuration describes a chain at all.
    pub fn has_chain(&self) -> bool {
        !self.measures.is_empty() || self.hermitian.is_some()
    }

    pub fn fock_options(&self) -> Option<FockOptions> {
        self.fock.as_ref().map(|f| {
            let mut o = FockOptions::new(f.levels, f.cutoff.unwrap_or(f.levels));
            if let Some(order) = f.order {
                o.order = order;
            }
            o.check_doubling = f.check_doubling;
            o.check_selection = f.check_selection;
            o
        })
    }

    pub fn gspecs<F: Field>(&self) -> Result<Vec<BilinearSpec<F>>> {
        let Some(f) = &self.fock else { return Ok(Vec::new()) };
        f.gspecs
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let terms = g
                    .terms
                    .iter()
                    .enumerate()
                    .map(|(k, (a, b, c))| Ok((*a, *b, scalar(c, &format!("fock.gspecs[{i}].terms[{k}]"))?)))
                    .collect::<Result<Vec<_>>>()?;
                BilinearSpec::new(i + 2, terms)
            })
            .collect()
    }

    fn measures<F: Field>(&self) -> Result<Vec<DiscreteMeasure<F>>> {
        self.measures
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let atoms = m
                    .atoms
                    .iter()
                    .enumerate()
                    .map(|(k, [x, y, w])| {
                        let at = |what: &str| format!("measures[{i}].atoms[{k}].{what}");
                        Ok(Atom::new(scalar(x, &at("x"))?, scalar(y, &at("y"))?, scalar(w, &at("w"))?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                DiscreteMeasure::new(i + 1, atoms)
            })
            .collect()
    }

    fn kernels<F: Field>(&self) -> Result<Vec<CouplingKernel<F>>> {
        self.kernels.iter().enumerate().map(|(i, k)| kernel(k, i)).collect()
    }

    /// The open chain described by the configuration.
    ///
    /// Interior kernels come from the `kernels` list, or are tabulated from
    /// `fock.gspecs` when that list is empty.
    pub fn chain<F: Field>(&self) -> Result<ChainSpec<F>> {
        if let Some(h) = &self.hermitian {
            if F::MODE == Mode::Exact {
                return Err(Error::ExactTranscendental("the hermitian preset"));
            }
            let c = hermitian_chain_preset(self.n, &h.potentials, &h.couplings, &h.grids)?;
            return Ok(c.map(|v| F::from_f64(*v)));
        }
        if self.measures.is_empty() {
            return Err(Error::Config("no chain: give `measures` or `hermitian`".into()));
        }
        let p = self.p.unwrap_or(self.measures.len() + 1);
        let measures = self.measures()?;
        if self.kernels.is_empty() && p > 2 {
            if let (Some(opts), Some(_)) = (self.fock_options(), &self.fock) {
                return chain_from_g(p, self.n, measures, &self.gspecs()?, &opts);
            }
        }
        ChainSpec::new(p, self.n, measures, self.kernels()?)
    }

    /// The closed chain for `loop`: `p` measures and `p` kernels, `kernels[i]`
    /// being `rho_{i+1}`.
    pub fn closed_chain<F: Field>(&self) -> Result<ClosedChainSpec<F>> {
        let p = self.p.unwrap_or(self.measures.len());
        ClosedChainSpec::new(p, self.n, self.measures()?, self.kernels()?)
    }

    pub fn deformation(&self, p: usize) -> Result<TimeDeformation> {
        let Some(d) = &self.deformation else { return Ok(TimeDeformation::zero(p)) };
        let pad = |v: &Vec<Vec<f64>>| {
            let mut v = v.clone();
            v.resize(p.max(v.len()), Vec::new());
            v
        };
        let mut charges = d.charges.clone();
        charges.resize(p.max(charges.len()), 0);
        let def = TimeDeformation { t: pad(&d.t), tbar: pad(&d.tbar), charges };
        def.validate(p)?;
        Ok(def)
    }
}

fn scalar<F: Field>(s: &Scalar, at: &str) -> Result<F> {
    if F::MODE == Mode::Float {
        return Ok(F::from_f64(s.to_f64()));
    }
    F::from_scalar(s).map_err(|_| {
        Error::Config(format!(
            "{at}: {s} is a non-integer JSON number, which exact mode cannot take; write it as a \"num/den\" string"
        ))
    })
}

fn kernel<F: Field>(k: &KernelConfig, i: usize) -> Result<CouplingKernel<F>> {
    match k {
        KernelConfig::Polynomial(terms) => {
            let terms = terms
                .iter()
                .enumerate()
                .map(|(t, (m, n, c))| Ok((*m, *n, scalar(c, &format!("kernels[{i}].polynomial[{t}]"))?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(CouplingKernel::Polynomial(BivariatePolynomial::new(terms)))
        }
        KernelConfig::Table(t) => {
            let at = |what: String| format!("kernels[{i}].table.{what}");
            let ys = t.ys.iter().enumerate().map(|(k, v)| scalar(v, &at(format!("ys[{k}]")))).collect::<Result<_>>()?;
            let xs = t.xs.iter().enumerate().map(|(k, v)| scalar(v, &at(format!("xs[{k}]")))).collect::<Result<_>>()?;
            let rows = t
                .values
                .iter()
                .enumerate()
                .map(|(r, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(c, v)| scalar(v, &at(format!("values[{r}][{c}]"))))
                        .collect::<Result<Vec<F>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let values = if rows.is_empty() { Matrix::zeros(0, 0) } else { Matrix::from_rows(rows)? };
            Ok(CouplingKernel::Table(KernelTable::new(ys, xs, values)?))
        }
    }
}

/// A chain in whichever mode the run asked for.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyChain {
    Exact(ChainSpec<Rational>),
    Float(ChainSpec<f64>),
}

impl AnyChain {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        match cfg.mode() {
            Mode::Exact => cfg.chain().map(AnyChain::Exact),
            Mode::Float => cfg.chain().map(AnyChain::Float),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            AnyChain::Exact(_) => Mode::Exact,
            AnyChain::Float(_) => Mode::Float,
        }
    }

    pub fn p(&self) -> usize {
        match self {
            AnyChain::Exact(c) => c.p(),
            AnyChain::Float(c) => c.p(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyChain::Exact(c) => c.n(),
            AnyChain::Float(c) => c.n(),
        }
    }
}
