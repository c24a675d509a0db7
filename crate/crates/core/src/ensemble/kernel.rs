use crate::error::{Error, Result};
use crate::numerics::{Field, Matrix};

/// Coupling function `rho_alpha(y, x)` between adjacent measures.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingKernel<F> {
    Table(KernelTable<F>),
    Polynomial(BivariatePolynomial<F>),
}

impl<F: Field> CouplingKernel<F> {
    pub fn eval(&self, y: &F, x: &F) -> Result<F> {
        match self {
            CouplingKernel::Table(t) => t.lookup(y, x).cloned(),
            CouplingKernel::Polynomial(p) => Ok(p.eval(y, x)),
        }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> CouplingKernel<G> {
        match self {
            CouplingKernel::Table(t) => CouplingKernel::Table(KernelTable {
                ys: t.ys.iter().map(&f).collect(),
                xs: t.xs.iter().map(&f).collect(),
                values: t.values.map(&f),
            }),
            CouplingKernel::Polynomial(p) => CouplingKernel::Polynomial(BivariatePolynomial {
                terms: p.terms.iter().map(|(m, n, c)| (*m, *n, f(c))).collect(),
            }),
        }
    }

    /// Tabulates the kernel on a grid, keeping the grids as keys.
    pub fn tabulate(&self, ys: &[F], xs: &[F]) -> Result<KernelTable<F>> {
        let mut values = Matrix::zeros(ys.len(), xs.len());
        for (i, y) in ys.iter().enumerate() {
            for (j, x) in xs.iter().enumerate() {
                values[(i, j)] = self.eval(y, x)?;
            }
        }
        KernelTable::new(ys.to_vec(), xs.to_vec(), values)
    }
}

/// `kernel_eval` in operation form.
pub fn kernel_eval<F: Field>(k: &CouplingKernel<F>, y: &F, x: &F) -> Result<F> {
    k.eval(y, x)
}

/// Kernel values on a finite grid `ys x xs`.
///
/// Lookups resolve `y` and `x` to grid indices first; the values themselves
/// are stored by index, so float-mode keys are the exact grid points the
/// table was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable<F> {
    ys: Vec<F>,
    xs: Vec<F>,
    values: Matrix<F>,
}

impl<F: Field> KernelTable<F> {
    pub fn new(ys: Vec<F>, xs: Vec<F>, values: Matrix<F>) -> Result<Self> {
        if values.rows() != ys.len() || values.cols() != xs.len() {
            return Err(Error::Dimension(format!(
                "kernel table is {}x{} but grids have {} ys and {} xs",
                values.rows(),
                values.cols(),
                ys.len(),
                xs.len()
            )));
        }
        Ok(Self { ys, xs, values })
    }

    pub fn ys(&self) -> &[F] {
        &self.ys
    }

    pub fn xs(&self) -> &[F] {
        &self.xs
    }

    pub fn values(&self) -> &Matrix<F> {
        &self.values
    }

    pub fn index_of(&self, y: &F, x: &F) -> Option<(usize, usize)> {
        let i = self.ys.iter().position(|v| v == y)?;
        let j = self.xs.iter().position(|v| v == x)?;
        Some((i, j))
    }

    pub fn lookup(&self, y: &F, x: &F) -> Result<&F> {
        self.index_of(y, x)
            .map(|ij| &self.values[ij])
            .ok_or_else(|| Error::MissingKernelEntry { y: y.to_string(), x: x.to_string() })
    }

    pub fn values_mut(&mut self) -> &mut Matrix<F> {
        &mut self.values
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.values[(i, j)] = v;
    }
}

/// `sum c_{mn} y^m x^n` with finitely many terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BivariatePolynomial<F> {
    terms: Vec<(u32, u32, F)>,
}

impl<F: Field> BivariatePolynomial<F> {
    /// Terms are `(degree in y, degree in x, coefficient)`.
    pub fn new(terms: Vec<(u32, u32, F)>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[(u32, u32, F)] {
        &self.terms
    }

    pub fn eval(&self, y: &F, x: &F) -> F {
        self.terms.iter().fold(F::zero(), |acc, (m, n, c)| acc + c.clone() * pow(y, *m) * pow(x, *n))
    }

    /// Highest powers of `y` and of `x` that occur.
    pub fn degrees(&self) -> (usize, usize) {
        self.terms.iter().fold((0, 0), |(a, b), (m, n, _)| (a.max(*m as usize), b.max(*n as usize)))
    }

    /// Coefficient matrix `C[m][n]`, so that the kernel is `sum C[m][n] y^m x^n`.
    pub fn coefficients(&self) -> Matrix<F> {
        let (dy, dx) = self.degrees();
        let mut c = Matrix::zeros(dy + 1, dx + 1);
        for (m, n, v) in &self.terms {
            let cell = &mut c[(*m as usize, *n as usize)];
            *cell = std::mem::replace(cell, F::zero()) + v;
        }
        c
    }

    /// `K[s][t] = rho(ys[s], xs[t])` built from cached powers.
    pub fn table(&self, ys: &[F], xs: &[F]) -> Matrix<F> {
        let (dy, dx) = self.degrees();
        let py: Vec<Vec<F>> = ys.iter().map(|y| crate::numerics::powers(y, dy)).collect();
        let px: Vec<Vec<F>> = xs.iter().map(|x| crate::numerics::powers(x, dx)).collect();
        Matrix::from_fn(ys.len(), xs.len(), |s, t| {
            self.terms
                .iter()
                .fold(F::zero(), |acc, (m, n, c)| acc + c.clone() * &py[s][*m as usize] * &px[t][*n as usize])
        })
    }
}

fn pow<F: Field>(v: &F, e: u32) -> F {
    crate::numerics::monomial(v, e as usize)
}
