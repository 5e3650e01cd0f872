//! Noise-aware re-tuning of quantum circuit rotation angles.
//!
//! Given a circuit over a parameterized gate set, this crate fixes the gate
//! structure, numerically re-optimizes the rotation angles against a
//! noise-penalized overlap with the original unitary, and deletes
//! entangling gates whose angles converge to zero. Circuits larger than the
//! dense-simulation limit are split into sliding windows that are re-tuned
//! independently.
//!
//! The main entry points:
//!
//! - [`circuit::Circuit`]: the IR, with [`circuit::Circuit::parse`] /
//!   [`circuit::Circuit::serialize`] for the JSON and QASM-subset formats
//!   and [`circuit::rebase`] into the native gate set;
//! - [`passes::optimize_circuit`]: the full pass, returning the re-tuned
//!   circuit and an [`metrics::OptimizationReport`];
//! - [`merit::evaluate`]: the figure of merit and its analytic gradient;
//! - [`optimizer::maximize`]: the bound-constrained quasi-Newton search.

pub mod ansatz;
pub mod circuit;
pub mod error;
pub mod gates;
pub mod merit;
pub mod metrics;
pub mod optimizer;
pub mod passes;

pub use error::{Error, Result};

/// Dense simulation limit: circuits (and windows) are capped at this many
/// qubits, i.e. 32×32 unitaries.
pub const MAX_QUBITS: usize = 5;
