//! Chain data: atomic measures, coupling kernels, chains, time deformations.

mod bilinear;
mod chain;
mod deform;
mod kernel;
mod measure;
mod preset;

pub use bilinear::BilinearSpec;
pub use chain::{ChainSpec, ClosedChainSpec};
pub use deform::{deform_measure, eval_v, eval_v_inverse, Slot, TimeDeformation};
pub use kernel::{kernel_eval, BivariatePolynomial, CouplingKernel, KernelTable};
pub use measure::{Atom, DiscreteMeasure};
pub use preset::hermitian_chain_preset;
