//! Truncated multi-component charged free fermions.
//!
//! Component `alpha` at level `n` is the flat mode `p n + alpha - 1`; states
//! are sparse maps from occupation patterns to amplitudes over a window of
//! levels `-M..M` per component, with every negative level filled in the
//! vacuum.

mod chain;
mod ops;
mod vacua;
mod vector;
mod window;

pub use chain::{
    chain_from_g, chain_vev, check_kernels, kernel_from_g, rho_from_g, sandwich_vev, z_fock, z_fock_full,
    z_fock_unchecked, FockOptions,
};
pub use ops::{
    apply_a, apply_a_transposed, apply_bilinear, apply_exp_bilinear, apply_exp_h, apply_exp_hbar, apply_field_f,
    apply_field_fbar, apply_h, exp_series, transpose_bilinear,
};
pub use vacua::{charged_vacuum, charged_vacuum_bra, charged_vacuum_ket};
pub use vector::{vev, FockVector};
pub use window::{ModeWindow, Pattern, MAX_MODES};
