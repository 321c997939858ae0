//! Design-fidelity datasets: Latin-hypercube sampling of the feasibility
//! box, parallel evaluation through a fidelity evaluator, and CSV
//! persistence with provenance.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::device::{DeviceParams, NoiseParams};
use crate::error::{Error, Result};
use crate::readout::{
    classify_and_score, pointer_record, reference_separation, sample_shots_with_reference,
    FidelityEstimate,
};
use crate::surrogate::theta::{theta_names, ThetaSpace, THETA_DIM};
use crate::util::{normal_cdf, rng_for};

/// Magic line opening every dataset CSV.
pub const DATASET_MAGIC: &str = "# qchip-dataset v1";

/// Scores one candidate design with a readout fidelity in [0, 1].
pub trait FidelityEvaluator: Sync {
    fn evaluate(&self, params: &DeviceParams) -> Result<f64>;

    /// Short provenance label recorded with generated datasets.
    fn label(&self) -> String {
        "custom".into()
    }
}

impl<F> FidelityEvaluator for F
where
    F: Fn(&DeviceParams) -> Result<f64> + Sync,
{
    fn evaluate(&self, params: &DeviceParams) -> Result<f64> {
        self(params)
    }
}

/// The standard evaluator: analytic separation fidelity of the dispersive
/// readout at a fixed noise fraction.
///
/// The noise scale `sigma = kappa_snr * ref_separation` is pinned once to the
/// base design at the calibration bias, so candidate designs with larger
/// pointer separation genuinely score higher. The analytic
/// `Phi(sep / (2 sigma))` fast path is used for dataset generation (its cost
/// is two pointer simulations per sample); shot-sampled classification is
/// reserved for final verification of single candidates.
pub struct ReadoutFidelityEvaluator {
    noise: NoiseParams,
    kappa_snr: f64,
    ref_separation: f64,
}

impl ReadoutFidelityEvaluator {
    pub fn new(base: &DeviceParams, noise: NoiseParams, kappa_snr: f64) -> Result<Self> {
        if !kappa_snr.is_finite() || kappa_snr <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "noise fraction must be positive and finite, got {kappa_snr}"
            )));
        }
        let ref_separation = reference_separation(base, &noise)?;
        Ok(ReadoutFidelityEvaluator { noise, kappa_snr, ref_separation })
    }

    pub fn kappa_snr(&self) -> f64 {
        self.kappa_snr
    }

    /// Pointer separation of the base design at the calibration bias.
    pub fn ref_separation(&self) -> f64 {
        self.ref_separation
    }

    /// Shot-sampled empirical verification of one candidate.
    pub fn verify_empirical(
        &self,
        params: &DeviceParams,
        n_shots: usize,
        seed: u64,
    ) -> Result<FidelityEstimate> {
        let iq = pointer_record(params, &self.noise)?;
        let cloud = sample_shots_with_reference(
            &iq,
            self.kappa_snr,
            self.ref_separation,
            n_shots,
            seed,
        )?;
        classify_and_score(&cloud)
    }
}

impl FidelityEvaluator for ReadoutFidelityEvaluator {
    fn evaluate(&self, params: &DeviceParams) -> Result<f64> {
        let separation = pointer_record(params, &self.noise)?.separation();
        Ok(normal_cdf(separation / (2.0 * self.kappa_snr * self.ref_separation)))
    }

    fn label(&self) -> String {
        format!("analytic-separation kappa_snr={}", self.kappa_snr)
    }
}

/// Simulator settings a dataset was generated under.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatasetProvenance {
    /// Evaluator label, e.g. "analytic-separation kappa_snr=0.2".
    pub evaluator: String,
    /// Base sampling seed.
    pub seed: u64,
    /// Feasibility-box descriptor, e.g. "fractional:0.2".
    pub space: String,
}

/// Normalized design vectors with their simulated fidelities.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamDataset {
    samples: Vec<(Vec<f64>, f64)>,
    skipped: Vec<(usize, String)>,
    provenance: DatasetProvenance,
}

impl ParamDataset {
    pub fn new(samples: Vec<(Vec<f64>, f64)>, provenance: DatasetProvenance) -> Result<Self> {
        let ds = ParamDataset { samples, skipped: Vec::new(), provenance };
        ds.validate()?;
        Ok(ds)
    }

    pub fn samples(&self) -> &[(Vec<f64>, f64)] {
        &self.samples
    }

    /// Indices and reasons of samples the evaluator rejected; these are
    /// dropped from the dataset, never imputed.
    pub fn skipped(&self) -> &[(usize, String)] {
        &self.skipped
    }

    pub fn provenance(&self) -> &DatasetProvenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, (theta, f)) in self.samples.iter().enumerate() {
            if theta.len() != THETA_DIM {
                return Err(Error::DimensionMismatch(format!(
                    "sample {i} has {} coordinates, expected {THETA_DIM}",
                    theta.len()
                )));
            }
            if theta.iter().any(|t| !t.is_finite() || !(0.0..=1.0).contains(t)) {
                return Err(Error::InvalidArgument(format!(
                    "sample {i} leaves the normalized box"
                )));
            }
            if !f.is_finite() || !(0.0..=1.0).contains(f) {
                return Err(Error::InvalidArgument(format!(
                    "sample {i} has fidelity {f} outside [0, 1]"
                )));
            }
        }
        if self.distinct_count() < 2 {
            return Err(Error::DegenerateDataset(format!(
                "need at least two distinct samples to train, have {}",
                self.distinct_count()
            )));
        }
        Ok(())
    }

    fn distinct_count(&self) -> usize {
        let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(self.samples.len());
        for (theta, _) in &self.samples {
            seen.insert(theta.iter().map(|t| t.to_bits()).collect());
        }
        seen.len()
    }

    /// CSV: provenance comment lines, a header row of dimension names plus
    /// `fidelity`, then one row per sample. Skipped-sample logs are
    /// transient and not persisted.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(DATASET_MAGIC);
        out.push('\n');
        out.push_str(&format!("# seed: {}\n", self.provenance.seed));
        out.push_str(&format!("# space: {}\n", self.provenance.space));
        out.push_str(&format!("# evaluator: {}\n", self.provenance.evaluator));
        out.push_str(&theta_names().join(","));
        out.push_str(",fidelity\n");
        for (theta, f) in &self.samples {
            for t in theta {
                out.push_str(&format!("{t},"));
            }
            out.push_str(&format!("{f}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let corrupt = |msg: String| Error::CorruptArtifact(format!("dataset csv: {msg}"));
        let mut lines = text.lines();
        match lines.next() {
            Some(line) if line.trim_end() == DATASET_MAGIC => {}
            _ => return Err(corrupt("missing magic line".into())),
        }
        let mut provenance = DatasetProvenance::default();
        let mut header = None;
        for line in lines.by_ref() {
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.trim_start().split_once(": ") {
                    match key {
                        "seed" => {
                            provenance.seed = value
                                .trim()
                                .parse()
                                .map_err(|_| corrupt(format!("bad seed '{value}'")))?;
                        }
                        "space" => provenance.space = value.trim().to_string(),
                        "evaluator" => provenance.evaluator = value.trim().to_string(),
                        _ => {}
                    }
                }
            } else {
                header = Some(line);
                break;
            }
        }
        let expected_header = format!("{},fidelity", theta_names().join(","));
        match header {
            Some(h) if h.trim_end() == expected_header => {}
            _ => return Err(corrupt("header row does not list the expected columns".into())),
        }
        let mut samples = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != THETA_DIM + 1 {
                return Err(corrupt(format!(
                    "row {i} has {} fields, expected {}",
                    fields.len(),
                    THETA_DIM + 1
                )));
            }
            let mut values = Vec::with_capacity(THETA_DIM + 1);
            for field in &fields {
                values.push(
                    field
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| corrupt(format!("row {i}: bad number '{field}'")))?,
                );
            }
            let f = values.pop().expect("row has a fidelity column");
            samples.push((values, f));
        }
        ParamDataset::new(samples, provenance)
    }
}

/// Latin-hypercube sample of the unit cube: `n` points, each dimension's
/// strata hit exactly once, deterministic under the seed.
pub fn latin_hypercube(n: usize, dim: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two samples for a stratified design, got {n}"
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be nonzero".into()));
    }
    let mut points = vec![vec![0.0; dim]; n];
    for d in 0..dim {
        let mut rng = rng_for(seed, d as u64);
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(&mut rng);
        for (i, point) in points.iter_mut().enumerate() {
            point[d] = (strata[i] as f64 + rng.gen::<f64>()) / n as f64;
        }
    }
    Ok(points)
}

/// Generate a labeled dataset over the feasibility box.
///
/// Samples come from a Latin hypercube; each candidate is decoded and scored
/// by the evaluator in parallel. Evaluator failures skip the sample and log
/// the reason, leaving the surviving samples untouched.
pub fn generate_dataset<E: FidelityEvaluator>(
    space: &ThetaSpace,
    n: usize,
    evaluator: &E,
    seed: u64,
) -> Result<ParamDataset> {
    let thetas = latin_hypercube(n, THETA_DIM, seed)?;
    let outcomes: Vec<Result<f64>> = thetas
        .par_iter()
        .map(|theta| {
            let params = space.decode(theta)?;
            let f = evaluator.evaluate(&params)?;
            if !f.is_finite() || !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidArgument(format!(
                    "evaluator returned fidelity {f} outside [0, 1]"
                )));
            }
            Ok(f)
        })
        .collect();

    let mut samples = Vec::with_capacity(n);
    let mut skipped = Vec::new();
    for (i, (theta, outcome)) in thetas.into_iter().zip(outcomes).enumerate() {
        match outcome {
            Ok(f) => samples.push((theta, f)),
            Err(e) => skipped.push((i, e.to_string())),
        }
    }
    let mut dataset = ParamDataset::new(
        samples,
        DatasetProvenance {
            evaluator: evaluator.label(),
            seed,
            space: space.descriptor().to_string(),
        },
    )?;
    dataset.skipped = skipped;
    Ok(dataset)
}
