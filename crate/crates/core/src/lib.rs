//! Learning and property testing of quantum states with high stabilizer
//! dimension.
//!
//! * [`f2lin`]: bit-packed symplectic linear algebra over F_2^{2n}.
//! * [`pauli`]: Weyl operators and exact oracles for `p_ψ`, `q_ψ`, `Weyl(|ψ⟩)`.
//! * [`clifford`]: Clifford circuits, their symplectic action, and the
//!   circuit that maps an isotropic subspace onto trailing Z operators.
//! * [`simstate`]: dense statevector simulation and Bell difference sampling.
//! * [`learner`]: the stabilizer-dimension tester and the tomography algorithm.

pub mod clifford;
pub mod error;
pub mod f2lin;
pub mod learner;
pub mod pauli;
pub mod simstate;
mod textfmt;

pub use clifford::{isotropic_mapping_circuit, CliffordCircuit, CliffordGate};
pub use error::{Error, Result};
pub use f2lin::{random_isotropic_subspace, row_reduce, symplectic_product, F2Vector, Subspace};
pub use learner::{learn_state, property_test, reconstruct, LearnedState, LearnerConfig};
pub use pauli::{char_distribution, q_distribution, CharDistribution};
pub use simstate::{random_doped_circuit, DopedCircuit, Doping, Gate, StateSource, StateVector};
