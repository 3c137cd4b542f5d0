//! Simulation of leakage suppression in driven three-level qubits.
//!
//! The crate covers four layers:
//!
//! - [`linalg`]: small dense complex matrices, state vectors, Kronecker
//!   products and the matrix exponential.
//! - [`models`]: the Hamiltonians and projectors (two-level toy, driven
//!   three-level qubit in the rotating frame, tunneling-broadened third level,
//!   three coupled qubits).
//! - [`engine`]: projective-measurement (Zeno) evolution, free unitary
//!   evolution, continuous tunneling evolution, closed-form survival formulas
//!   and the second-order short-time expansion.
//! - [`ghz`]: the single-step GHZ pulse protocol on three two-level qubits.
//!
//! [`report`] ties these together into scenario configs, parameter sweeps,
//! CSV output and the critical-measurement-number search used by the `zeno`
//! command-line tool.
//!
//! Units: ħ = 1, frequencies and rates in rad/ns, times in ns.

pub mod engine;
pub mod error;
pub mod ghz;
pub mod linalg;
pub mod models;
pub mod report;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, QuantumState, C64};
