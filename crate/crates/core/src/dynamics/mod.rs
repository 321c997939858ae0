//! Open-system time evolution: density-matrix (Lindblad) integration and
//! Monte-Carlo wave-function trajectory unraveling, plus the state and
//! record types they share.

mod master;
mod record;
mod trajectories;

pub use master::{
    evolve_master, evolve_master_opts, MasterOptions, Observable, MAX_DYNAMICS_DIM,
};
pub use record::{EvolutionRecord, QuantumState};
pub use trajectories::{evolve_trajectories, JumpEvent, TrajectoryRecord, TrajectoryResult};
