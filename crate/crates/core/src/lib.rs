//! Approximate low-energy spectra of transverse-field Ising Hamiltonians.
//!
//! The Hamiltonian is `H(s) = -(Δ(s)/2) Σ σx_i + (𝓔(s)/2) H_P` with the
//! diagonal problem part `H_P = Σ h_i σz_i + Σ J_ij σz_i σz_j`. Each
//! requested level `k` gets its own effective Hamiltonian on a subspace of
//! low-energy classical states: diagonal elements are expanded to fourth
//! order in the transverse field, off-diagonal elements to second order, and
//! the level is read off the diagonalized matrix.
//!
//! Module map:
//!
//! * [`ising`]: problems, spin states, schedules, instance generation.
//! * [`subspace`]: k-best bucket elimination for the lowest classical states.
//! * [`perturbation`]: per-level effective Hamiltonians and the small parameter.
//! * [`eigen`]: dense symmetric eigensolver and the exact-diagonalization oracle.
//! * [`sweep`]: level selection, s-grid sweeps and minimum-gap location.

pub mod eigen;
pub mod error;
pub mod ising;
pub mod perturbation;
pub mod subspace;
pub mod sweep;

pub use error::{Error, Result};
pub use ising::{IsingProblem, Schedule, SpinState};
pub use subspace::SubspaceBasis;
