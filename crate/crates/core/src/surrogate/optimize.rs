//! Surrogate-guided design optimization: projected gradient ascent on the
//! predicted fidelity, with periodic re-scoring by the true simulator.
//!
//! The surrogate only steers the search. Every fidelity reported out of this
//! module comes from the simulator-side evaluator; the best simulator-scored
//! candidate wins, and if nothing beats the starting design the start is
//! returned with a no-improvement flag.

use crate::error::{Error, Result};
use crate::surrogate::dataset::FidelityEvaluator;
use crate::surrogate::network::DifferentiablePredictor;
use crate::surrogate::theta::{theta_names, ThetaSpace, THETA_DIM};
use crate::surrogate::train::{OptimizerKind, OptimizerState};

/// Gradient-ascent settings.
#[derive(Debug, Clone, Copy)]
pub struct OptimizeSettings {
    pub kind: OptimizerKind,
    /// `None` picks the optimizer's default rate.
    pub learning_rate: Option<f64>,
    /// Ascent steps to take.
    pub steps: usize,
    /// Re-score the candidate with the simulator every this many steps.
    pub check_every: usize,
}

impl Default for OptimizeSettings {
    fn default() -> Self {
        OptimizeSettings {
            kind: OptimizerKind::Adam,
            learning_rate: Some(0.02),
            steps: 200,
            check_every: 25,
        }
    }
}

impl OptimizeSettings {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidArgument("need at least one ascent step".into()));
        }
        if self.check_every == 0 {
            return Err(Error::InvalidArgument(
                "simulator check interval must be nonzero".into(),
            ));
        }
        if let Some(lr) = self.learning_rate {
            if !lr.is_finite() || lr <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "learning rate must be positive, got {lr}"
                )));
            }
        }
        Ok(())
    }
}

/// Where a reported fidelity came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreSource {
    /// The master-equation / readout simulator, never the surrogate.
    Simulator,
}

/// One ascent step of the trace.
#[derive(Debug, Clone)]
pub struct TracePoint {
    pub step: usize,
    /// Candidate after the step's box projection.
    pub theta: Vec<f64>,
    /// Surrogate prediction at the candidate.
    pub predicted: f64,
    /// Simulator score, present on checking steps.
    pub simulated: Option<f64>,
}

/// Optimization result.
#[derive(Debug, Clone)]
pub struct OptimizationOutcome {
    /// Best simulator-verified candidate (the start when nothing improved).
    pub theta_opt: Vec<f64>,
    /// Simulator fidelity of `theta_opt`.
    pub simulated_fidelity: f64,
    /// Simulator fidelity of the starting design.
    pub start_fidelity: f64,
    /// False when no candidate beat the start.
    pub improved: bool,
    /// Provenance of every fidelity in this struct.
    pub score_source: ScoreSource,
    pub trace: Vec<TracePoint>,
    /// Simulator evaluations spent.
    pub evaluations: usize,
}

impl OptimizationOutcome {
    /// CSV with one row per step: predicted and (where available) simulated
    /// fidelity, then the candidate coordinates.
    pub fn trace_to_csv(&self) -> String {
        let mut out = String::from("step,predicted,simulated,");
        out.push_str(&theta_names().join(","));
        out.push('\n');
        for p in &self.trace {
            out.push_str(&format!("{},{},", p.step, p.predicted));
            match p.simulated {
                Some(s) => out.push_str(&format!("{s}")),
                None => out.push_str(""),
            }
            for t in &p.theta {
                out.push_str(&format!(",{t}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Projected gradient ascent on the predicted fidelity.
///
/// `start` must lie inside the normalized box. Every `check_every` steps
/// (and on the final step) the candidate is re-scored by `evaluator` on the
/// decoded parameters; the best simulator score is tracked throughout.
pub fn optimize<P, E>(
    predictor: &P,
    space: &ThetaSpace,
    start: &[f64],
    settings: &OptimizeSettings,
    evaluator: &E,
) -> Result<OptimizationOutcome>
where
    P: DifferentiablePredictor,
    E: FidelityEvaluator,
{
    settings.validate()?;
    if start.len() != THETA_DIM {
        return Err(Error::DimensionMismatch(format!(
            "start vector has {} coordinates, expected {THETA_DIM}",
            start.len()
        )));
    }
    if !space.contains(start) {
        return Err(Error::InvalidArgument(
            "starting design lies outside the normalized box".into(),
        ));
    }

    let mut evaluations = 0;
    let mut score = |theta: &[f64]| -> Result<f64> {
        evaluations += 1;
        evaluator.evaluate(&space.decode(theta)?)
    };

    let start_fidelity = score(start)?;
    let mut best_theta = start.to_vec();
    let mut best_fidelity = start_fidelity;

    let mut theta = start.to_vec();
    let mut opt = OptimizerState::new(settings.kind, THETA_DIM);
    if let Some(lr) = settings.learning_rate {
        opt = opt.with_learning_rate(lr)?;
    }

    let mut trace = Vec::with_capacity(settings.steps);
    let mut descent = vec![0.0; THETA_DIM];
    for step in 1..=settings.steps {
        let (_, gradient) = predictor.value_and_gradient(&theta)?;
        for (d, g) in descent.iter_mut().zip(&gradient) {
            *d = -g; // ascend the prediction
        }
        opt.step(&mut theta, &descent)?;
        for t in theta.iter_mut() {
            *t = t.clamp(0.0, 1.0); // box projection
        }
        let predicted = predictor.predict(&theta)?;

        let simulated = if step % settings.check_every == 0 || step == settings.steps {
            let f = score(&theta)?;
            if f > best_fidelity {
                best_fidelity = f;
                best_theta = theta.clone();
            }
            Some(f)
        } else {
            None
        };
        trace.push(TracePoint { step, theta: theta.clone(), predicted, simulated });
    }

    let improved = best_fidelity > start_fidelity;
    Ok(OptimizationOutcome {
        theta_opt: if improved { best_theta } else { start.to_vec() },
        simulated_fidelity: if improved { best_fidelity } else { start_fidelity },
        start_fidelity,
        improved,
        score_source: ScoreSource::Simulator,
        trace,
        evaluations,
    })
}
