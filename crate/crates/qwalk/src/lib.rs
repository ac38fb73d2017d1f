//! Continuous-time quantum and classical walks with absorbing traps on
//! Erdős–Rényi graphs.
//!
//! The library covers the full pipeline: connected G(N, p) generation with
//! seeded reproducibility, trap placement, the classical transfer operator
//! T = −L − Γ and the non-Hermitian effective Hamiltonian H = L − iΓ, dense
//! real-symmetric and complex-symmetric eigendecompositions, survival-curve
//! evaluation for both walk kinds, exponential decay-rate fits, plateau and
//! localization diagnostics, perturbative predictions, and seeded ensemble
//! averaging.
//!
//! Start with the `examples/` directory: each file is a runnable walkthrough
//! of one capability. The `qwalk-trap` binary batches the same machinery for
//! larger experiment sweeps.

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod runner;
pub mod seeds;
pub mod spectra;

pub use error::{QwalkError, Result};
