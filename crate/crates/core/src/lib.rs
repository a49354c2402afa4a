//! Lattice walks on the light cone: feasibility of prescribed densities,
//! synthesis of the coins or jump probabilities that realize them, and the
//! forward evolutions used to check the results.
//!
//! Every numerical type is generic over [`Scalar`] (`f32` or `f64`). The
//! `f64` aliases at the crate root cover the common case.

pub mod error;
pub mod evolve;
pub mod feasibility;
pub mod formats;
pub mod lattice;
pub mod scalar;
pub mod sum;
pub mod synthesis;
pub mod targets;

pub use error::{Error, Result};
pub use feasibility::{flux_from_rho, validate, validate_sequence, FeasibilityReport, Violation};
pub use lattice::{on_support, LatticeIndex};
pub use scalar::Scalar;
pub use synthesis::{
    mimic_quantum_walk, realify_quantum_walk, reconstruct_wavefield, synthesize_coins, synthesize_jumps,
    synthesize_qw, synthesize_rw,
};
pub use targets::{TargetKind, TargetSpec};

pub type ProbabilitySequence = lattice::ProbabilitySequence<f64>;
pub type WaveField = lattice::WaveField<f64>;
pub type ComplexWaveField = lattice::ComplexWaveField<f64>;
pub type FluxField = lattice::FluxField<f64>;
pub type CoinSchedule = lattice::CoinSchedule<f64>;
pub type JumpSchedule = lattice::JumpSchedule<f64>;
pub type HomogeneousCoinParams = evolve::HomogeneousCoinParams<f64>;
pub type StdErrField = evolve::StdErrField<f64>;
