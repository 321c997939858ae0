//! Surrogate-assisted design optimization.
//!
//! The pipeline has four stages, each its own submodule:
//!
//! 1. [`theta`]: normalize the 34 tunable electrical parameters into a
//!    per-dimension feasibility box.
//! 2. [`dataset`]: Latin-hypercube sampling of the box, scored by the
//!    readout-fidelity simulator, persisted as CSV with provenance.
//! 3. [`network`]/[`train`]: a graph-encoded neural surrogate (chip topology
//!    -> message passing -> fully connected head) trained by minibatch MSE
//!    with in-module reverse-mode differentiation; Adam, momentum, and
//!    sign-gradient update rules.
//! 4. [`optimize`]: projected gradient ascent on the surrogate with
//!    periodic re-scoring by the true simulator; reported fidelities always
//!    come from the simulator.

mod dataset;
mod network;
mod optimize;
mod theta;
mod train;

pub use dataset::{
    generate_dataset, latin_hypercube, DatasetProvenance, FidelityEvaluator, ParamDataset,
    ReadoutFidelityEvaluator, DATASET_MAGIC,
};
pub use network::{
    Architecture, DifferentiablePredictor, PredictionGradients, Predictor, SurrogateModel,
    DEFAULT_HIDDEN, EMBED_DIM, NODE_COUNT, NODE_FEATURES, WEIGHTS_MAGIC,
};
pub use optimize::{
    optimize, OptimizationOutcome, OptimizeSettings, ScoreSource, TracePoint,
};
pub use theta::{theta_names, ThetaSpace, FLUX_DIM, THETA_DIM, WIDE_BOX_FACTOR};
pub use train::{
    loss_curve_to_csv, mse, r_squared, train, LossCurvePoint, OptimizerKind, OptimizerState,
    TrainingReport,
};
