//! Partition functions of open and closed chains of coupled matrices over
//! atomic measures, evaluated by direct enumeration, by a chained moment
//! determinant and by a truncated multi-component fermionic Fock space, plus
//! the time deformations that turn them into Toda-lattice tau functions.

pub mod chain_eval;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod family;
pub mod fock;
pub mod numerics;
pub mod tau;

pub use error::{Error, Mode, Result};
