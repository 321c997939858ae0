//! Desk-scale co-design toolkit for a nine-qubit superconducting chip.
//!
//! The device under study couples four interior transmons to a central
//! flux-tunable transmon, four exterior transmons to a shared readout
//! resonator, and interior/exterior pairs through four coupling resonators.
//! This crate models that system end to end:
//!
//! - [`linalg`]: complex dense/sparse matrices, tensor-space layouts,
//!   Hermitian propagators.
//! - [`device`]: device parameter sets (with presets), flux maps, Hamiltonian
//!   and collapse-operator construction, config-file parsing.
//! - [`dynamics`]: Lindblad master-equation integration and quantum-jump
//!   trajectory unraveling.
//! - [`readout`]: dispersive I/Q readout simulation, shot sampling, and
//!   separation-fidelity estimation.
//! - [`spectroscopy`]: two-tone spectra versus flux and avoided-crossing
//!   detection.
//! - [`pauli`]: spin-register mapping of the device Hamiltonian, Trotter
//!   gate synthesis, and effective two-qubit reductions.
//! - [`grover`]: a noisy two-qubit Grover benchmark driven by the effective
//!   two-qubit model.
//! - [`surrogate`]: fidelity datasets, a graph-structured surrogate network,
//!   training, and gradient-based design optimization.
//! - [`hardware`]: translation of the electrical parameter set into physical
//!   layout quantities.
//!
//! # Conventions
//!
//! All frequencies, couplings, and rates are angular (rad/s); all times are
//! seconds. Hamiltonians absorb the reduced Planck constant, so propagation
//! over `t` is `exp(-i H t)` and master-equation commutators need no extra
//! factor. Cyclic quantities quoted in GHz/MHz are converted with a factor
//! of 2 pi at the boundary (config files, CLI flags, reports) and nowhere
//! else.

pub mod device;
pub mod dynamics;
pub mod error;
pub mod grover;
pub mod hardware;
pub mod linalg;
pub mod pauli;
pub mod readout;
pub mod spectroscopy;
pub mod surrogate;
pub mod util;

pub use error::{Error, Result};

/// Default RNG seed used by CLI entry points and tests when none is given.
pub const DEFAULT_SEED: u64 = 42;
