//! Classical prediction of linear properties Tr(rho(x) O) of parameterized
//! Clifford+rotation circuits from classical-shadow training data.
//!
//! The pipeline: simulate a parameterized circuit, collect randomized-Pauli
//! shadow snapshots at sampled inputs, and build a truncated
//! trigonometric-monomial kernel model whose predictions need no further
//! quantum simulation. A classical exact-label backend covers small input
//! dimensions with the full expansion. On top sit offline variational
//! optimization (VQE and a binary classifier driven entirely by the
//! surrogate) and reproducible benchmark experiments with CSV output.

pub mod circuit;
pub mod error;
pub mod experiments;
pub mod learner;
pub mod pauli;
pub mod shadow;
pub mod trig;
pub mod vqa;

pub use error::Error;
