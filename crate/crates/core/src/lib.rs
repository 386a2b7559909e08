//! Variational computation of rotational periodic solutions of spatially
//! periodic Hamiltonian systems on `R^{2n-k} x T^k`.
//!
//! Loops are discretized as truncated Fourier series in `W^{1/2,2}(S^1, R^{2n})`,
//! the Hamiltonian is truncated outside a large `|z_I|` ball, critical points of
//! the action functional are located by a multi-start Newton search, and every
//! accepted orbit is re-checked by integrating the original flow.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimates;
pub mod functional;
pub mod hamiltonian;
pub mod sampling;
pub mod solver;
pub mod spectral;
pub mod truncation;
pub mod verifier;

pub use error::{Error, Result};
pub use estimates::EstimateBundle;
pub use functional::ActionProblem;
pub use hamiltonian::{BuiltinSystem, Hamiltonian, HamiltonianModel};
pub use solver::{CriticalPoint, SolverConfig};
pub use spectral::{FourierLoop, PhaseLayout, RotationVector, Subspace};
pub use truncation::TruncatedHamiltonian;
pub use verifier::OrbitSolution;
