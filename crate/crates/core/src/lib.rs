//! Compiler and verification engine for Fermi-Hubbard cluster Hamiltonians.

pub mod circuit;
pub mod cluster_hamiltonian;
pub mod error;
pub mod gate_compiler;
pub mod greens_function;
pub mod jordan_wigner;
pub mod linalg;
pub mod pauli_algebra;
pub mod statevector_sim;
pub mod trotter;

pub use circuit::{Circuit, Gate, GateCounts, GateKind};
pub use cluster_hamiltonian::{Block, ClusterSpec, Geometry, HamiltonianBlocks};
pub use error::{Error, Result};
pub use jordan_wigner::{Orbital, ProbeKind, Spin};
pub use pauli_algebra::{Pauli, PauliSum, PauliTerm};
pub use statevector_sim::QuantumState;
