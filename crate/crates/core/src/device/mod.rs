//! Device model: parameters, presets, flux map, subsystem selection,
//! Hamiltonian/collapse-operator construction, and config parsing.

pub mod config;
pub mod hamiltonian;
pub mod params;

pub use config::{apply_assignment, dump_config, parse_config_str, ParsedConfig};
pub use hamiltonian::{
    build_collapse_ops, build_hamiltonian, topology_couplings, CouplingPolicy, Frame,
    SubsystemSelector,
};
pub use params::{
    effective_j, flux_factor, tunable_freq, DeviceParams, ModeLabel, NoiseParams, Preset, TAU,
};
