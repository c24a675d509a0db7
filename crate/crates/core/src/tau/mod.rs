//! Time deformations of chains and the resulting tau functions.

mod eval;
mod flows;

pub use eval::{a_factor, deformed_pair, tau_eval, tau_eval_fock, tau_fock_vev, DeformedChain};
pub use flows::{kernel_miwa_check, miwa_shift, tau_normalised, toda_check, MiwaPoint, MiwaReport, TodaReport};
