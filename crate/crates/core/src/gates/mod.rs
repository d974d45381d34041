//! Spin-photon statevector, pulse sequences and the compilation of CNOTs
//! from the always-on Ising coupling.
//!
//! Conventions used everywhere in this module:
//!
//! * ion qubit `|e⟩ → 0`, `|g⟩ → 1`, so `σz = |e⟩⟨e| − |g⟩⟨g|`;
//! * photon polarisation `|σ₊⟩ → 0`, `|σ₀⟩ → 1`;
//! * ion 0 is the most significant qubit (spin-only matrices) or the most
//!   significant bit pair (spin-photon states), spin bit before photon bit;
//! * a rotation of `angle` about `axis` is `exp(−i angle/2 σ_axis)`;
//! * the Ising Hamiltonian is `H = −Σ_{i<j} (J_ij/2) σz^i σz^j`, so free
//!   evolution for `t` is `exp(+i t Σ_{i<j} (J_ij/2) σz^i σz^j)`.

mod compile;
mod matrix;
mod pulse;
mod state;

pub use compile::{
    cnot_product, cnot_sequence, compile_refocused_zz, controlled_x, gate_fidelity, walsh_slots, zz_rotation,
    CnotConvention, POLARITY_DIAGNOSTIC,
};
pub use matrix::{hadamard_matrix, pauli, rotation_matrix, GateMatrix};
pub use pulse::{sequence_unitary, Axis, PulseElement, PulseSequence};
pub use state::{Polarization, SpinLevel, SpinPhotonState, MAX_IONS};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GateError {
    #[error("ion index {ion} out of range for {count} ions")]
    IndexOutOfRange { ion: usize, count: usize },
    #[error("control and target must differ (both {0})")]
    SameQubit(usize),
    #[error("coupling J_{i}{j} is zero, cannot compile a ZZ rotation on that pair")]
    Uncompilable { i: usize, j: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0} ions requested, at most {MAX_IONS} are supported")]
    TooManyIons(usize),
    #[error("invalid pulse element: {0}")]
    InvalidElement(String),
    #[error("pulse sequence line {line}: {message}")]
    Parse { line: usize, message: String },
}
