//! Spin-register view of the chip: Pauli operator algebra, the mapping of
//! the device Hamiltonian onto nine qubits, rotation-gate circuits with
//! first-order Trotterization, and the reduction of mediated qubit pairs
//! to effective two-spin models.

pub mod circuit;
pub mod effective;
pub mod mapping;
pub mod strings;

pub use circuit::{Gate, GateCircuit, GateKind};
pub use effective::{
    effective_two_qubit, EffectivePair, Mediator, PairQubit, DISPERSIVE_RATIO_LIMIT,
    ZETA_CALIBRATION_SCALE,
};
pub use mapping::{
    exterior_qubit, interior_qubit, map_to_pauli, trotterize, tunable_qubit, REGISTER_SIZE,
};
pub use strings::{PauliAxis, PauliHamiltonian, PauliString, PauliTerm};
