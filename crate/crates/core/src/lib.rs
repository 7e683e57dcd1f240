//! Dimensional expressivity analysis of parametric quantum circuits.
//!
//! The crate simulates circuits exactly, classifies circuit parameters as
//! independent or redundant from the Gram matrix of the derivative states,
//! emulates the one-ancilla measurement scheme with shot noise, works out
//! translational-symmetry sectors, builds sector circuits automatically, and
//! estimates best-approximation errors.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

// `!(x > 0.0)` style guards reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod autobuild;
pub mod bestapprox;
pub mod circuit;
pub mod dea;
pub mod error;
pub mod linalg;
pub mod pauli;
pub mod scalar;
pub mod sectors;
pub mod shots;
pub mod simulator;

pub use circuit::{parse_circuit, Bitstring, CircuitBuilder, Gate, ParametricCircuit};
pub use dea::{classify_parameters, ClassificationReport, TolerancePolicy, Verdict};
pub use error::{Error, Result};
pub use pauli::{pauli_commute, translate_string, Generator, Pauli, PauliString};
pub use scalar::Real;

pub type StateVector = simulator::StateVector<f64>;
pub type StateVector32 = simulator::StateVector<f32>;
pub type SMatrix = dea::SMatrix<f64>;
pub type SMatrix32 = dea::SMatrix<f32>;
pub type Matrix = linalg::Matrix<f64>;
