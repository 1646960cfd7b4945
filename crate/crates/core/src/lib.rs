//! Exact laboratory for exponential sums over orbits of matrix groups acting on
//! `F_p^d`, together with verifiers for the growth and spectral inequalities that
//! bound such sums.
//!
//! Layers, bottom up:
//! - [`fp`]: residues, vectors, matrices, subspaces, hyperplanes.
//! - [`group`]: subgroup closure, orbits, stabilizers, hyperplane profiles, affine elements,
//!   commutators and lower central series probes.
//! - [`fourier`]: exponential sums, the full transform over `F_p^d`, large spectra and the
//!   spectral verifiers.
//! - [`affine`]: set algebra in `Aff_d(F_p)`, approximate-group diagnostics, the embedding of
//!   `H × Spec_α` and the block-inequality verifiers.
//! - [`lab`]: instance families, the verifier battery and sweeps with CSV/JSON output.

pub mod affine;
pub mod error;
pub mod exec;
pub mod fourier;
pub mod fp;
pub mod group;
pub mod lab;
pub mod random;
mod verdict;

pub use error::{Error, Result};
pub use exec::Execution;
pub use verdict::Verdict;
