//! Forward engines: the real inhomogeneous quantum walk, the homogeneous
//! walk on the complex plane (step-by-step and closed form), the random
//! walk master equation, and seeded Monte Carlo trajectories.

mod closed_form;
mod complex;
mod mc;
mod qw;
mod rw;

pub use closed_form::{
    asymptotic_density, closed_form_wavefield, lambda_kernel, symmetric_hadamard_density,
    symmetric_hadamard_jump, symmetry_conditions, LambdaTable,
};
pub use complex::{evolve_qw_complex, HomogeneousCoinParams};
pub use mc::{agreement_fraction, simulate_rw, McConfig, StdErrField};
pub use qw::{evolve_qw, qw_flux};
pub use rw::evolve_rw_exact;
