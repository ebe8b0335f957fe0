//! The guide's chapters as doc comments, so `cargo test --doc` runs every
//! listing. One module per chapter keeps failures traceable to a file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/qubits.md")]
pub mod qubits {}
#[doc = include_str!("../../../book/src/finite-ensembles.md")]
pub mod finite_ensembles {}
#[doc = include_str!("../../../book/src/limit.md")]
pub mod limit {}
#[doc = include_str!("../../../book/src/convergence.md")]
pub mod convergence {}
#[doc = include_str!("../../../book/src/identities.md")]
pub mod identities {}
#[doc = include_str!("../../../book/src/leggett-garg.md")]
pub mod leggett_garg {}
#[doc = include_str!("../../../book/src/bell.md")]
pub mod bell {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
