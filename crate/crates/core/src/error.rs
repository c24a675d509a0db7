use std::fmt;

use thiserror::Error;

/// Arithmetic mode of a [`crate::numerics::Scalar`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::Config(format!("unknown mode `{other}` (expected exact|float)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode mismatch: {0} value combined with {1} value")]
    ModeMismatch(Mode, Mode),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("wick word of length {len} exceeds the enumeration cap of {cap}")]
    WickTooLong { len: usize, cap: usize },
    #[error("kernel table has no entry for (y = {y}, x = {x})")]
    MissingKernelEntry { y: String, x: String },
    #[error("zero support point: {0}")]
    ZeroSupport(String),
    #[error("{0} requires float mode (exponentials are transcendental)")]
    ExactTranscendental(&'static str),
    #[error("float overflow in {0}")]
    FloatOverflow(String),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("mode (component {component}, level {level}) lies outside the window of {levels} levels")]
    OutsideWindow { component: usize, level: i64, levels: usize },
    #[error("charge {charge} exceeds window of {levels} levels")]
    ChargeExceedsWindow { charge: i64, levels: usize },
    #[error("{what}: series not converged after {order} terms")]
    NotConverged { what: String, order: usize },
    #[error("inadequate window: {0}")]
    InadequateWindow(String),
    #[error("kernel rho_{alpha} disagrees with its fermionic definition at (i = {i}, j = {j})")]
    KernelMismatch { alpha: usize, i: usize, j: usize },
    #[error("selection rule violated: {0}")]
    SelectionRule(String),
    #[error("degenerate tau function: {0}")]
    DegenerateTau(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
