//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Result`] with this error.
//! Variants are grouped by the failure class rather than by module so that
//! callers (CLI, tests) can match on the *kind* of problem without knowing
//! which layer raised it.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix/vector shapes are incompatible for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An operator that must be Hermitian is not (within tolerance).
    #[error("operator is not Hermitian: max |H - H^dagger| element = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// A caller-supplied value is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A physical-parameter set violates its own consistency rules
    /// (negative frequency, T2 > 2 T1, flux outside the principal branch, ...).
    #[error("unphysical parameters: {0}")]
    UnphysicalParameters(String),

    /// A coupling entry references a mode that is not part of the selected
    /// subsystem.
    #[error("dangling coupling: {0}")]
    DanglingCoupling(String),

    /// The selected subsystem is too large for a dynamics run.
    #[error("subsystem too large: total dimension {dim} exceeds the supported limit {limit}")]
    SubsystemTooLarge { dim: usize, limit: usize },

    /// The fixed-step integrator would need an unreasonably small step
    /// (stiff problem) or the step underflowed.
    #[error("stiffness detected: {0}; reduce the subsystem, shorten the horizon, or relax the fastest rates")]
    Stiffness(String),

    /// A self-consistency check on a finished integration failed
    /// (trace drift, half-step disagreement, ...).
    #[error("integration accuracy check failed: {0}")]
    AccuracyCheckFailed(String),

    /// A readout or coupling configuration sits outside the dispersive
    /// regime that the closed-form model assumes.
    #[error("dispersive approximation violated: {0}")]
    DispersiveViolation(String),

    /// Pointer states coincide; no classification axis exists.
    #[error("degenerate readout separation: {0}")]
    DegenerateSeparation(String),

    /// A spectroscopy map does not resolve enough peaks to report a gap.
    #[error("under-resolved spectrum: {0}; reduce the Lorentzian broadening or refine the probe grid")]
    UnderResolved(String),

    /// A gate, Pauli term, or circuit entry is outside the supported set.
    #[error("unsupported term: {0}")]
    UnsupportedTerm(String),

    /// Dataset generation or training received unusable data.
    #[error("degenerate dataset: {0}")]
    DegenerateDataset(String),

    /// Training diverged (non-finite loss).
    #[error("training diverged at epoch {epoch}: {detail}")]
    TrainingDiverged { epoch: usize, detail: String },

    /// A persisted artifact (weights file, dataset, config) failed to parse
    /// or failed its integrity check.
    #[error("corrupt or incompatible artifact: {0}")]
    CorruptArtifact(String),

    /// Configuration text could not be parsed or contains unknown keys.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem failure while reading or writing an artifact.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable kind tag, used by the CLI for one-line reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::NotHermitian { .. } => "not-hermitian",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::UnphysicalParameters(_) => "unphysical-parameters",
            Error::DanglingCoupling(_) => "dangling-coupling",
            Error::SubsystemTooLarge { .. } => "subsystem-too-large",
            Error::Stiffness(_) => "stiffness",
            Error::AccuracyCheckFailed(_) => "accuracy-check-failed",
            Error::DispersiveViolation(_) => "dispersive-violation",
            Error::DegenerateSeparation(_) => "degenerate-separation",
            Error::UnderResolved(_) => "under-resolved",
            Error::UnsupportedTerm(_) => "unsupported-term",
            Error::DegenerateDataset(_) => "degenerate-dataset",
            Error::TrainingDiverged { .. } => "training-diverged",
            Error::CorruptArtifact(_) => "corrupt-artifact",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}
