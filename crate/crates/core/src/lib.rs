//! Coarse-grained intensity measurements on large qubit ensembles and their
//! macroscopic-limit description on `L²(ℝ)`.
//!
//! * [`qubit`]: single-particle observables, decoherence channels and the
//!   parameters `(β, φ)` of the limit measurement.
//! * [`finite_n`]: exact outcome densities for `N` particles in a Dicke
//!   subspace, plus a literal `2^N` construction used as an oracle.
//! * [`limit`]: limit Kraus operators, closed-form densities, sequential
//!   measurement chains and the special-function identities behind them.
//! * [`devind`]: Bell-CHSH and Leggett-Garg-CHSH tests in the limit theory.

pub mod convergence;
pub mod density;
pub mod devind;
pub mod error;
pub mod finite_n;
pub mod limit;
pub mod quadrature;
pub mod qubit;
pub mod special;

pub use error::{Error, Result};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
