//! Monte-Carlo wave-function (quantum-trajectory) unraveling of the Lindblad
//! master equation.
//!
//! Each trajectory integrates the unnormalized state under the effective
//! non-Hermitian generator
//!
//! ```text
//! d psi/dt = -i H psi - (1/2) sum_k c_k^dag c_k psi
//! ```
//!
//! with classic RK4. The squared norm of `psi` decays monotonically; when it
//! crosses a uniform random threshold `r`, a jump is applied: the crossing
//! time is located by bisection inside the substep, a channel `k` is drawn
//! with probability proportional to `||c_k psi||^2`, the state is replaced by
//! the normalized `c_k psi`, and a fresh threshold is drawn. Averaging the
//! per-trajectory pure-state expectations over many trajectories reproduces
//! the master-equation expectations.
//!
//! Trajectory `i` uses an independent deterministic random stream derived
//! from `(seed, i)`, so results are reproducible and independent of thread
//! scheduling; the ensemble mean is formed from an index-ordered collection.

use rayon::prelude::*;

use crate::dynamics::master::{plan_substep, Observable};
use crate::dynamics::record::{EvolutionRecord, QuantumState};
use crate::error::{Error, Result};
use crate::linalg::{im, re, ComplexMatrix, C64};
use crate::util::rng_for;
use rand::Rng;

/// One detected quantum jump.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpEvent {
    /// Time of the jump (s), resolved by bisection within a substep.
    pub time: f64,
    /// Index of the collapse channel that fired.
    pub channel: usize,
}

/// A single stochastic trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    /// Per-observable expectation series on the output grid.
    pub expectations: Vec<Vec<C64>>,
    /// Jumps in time order.
    pub jumps: Vec<JumpEvent>,
    /// Normalized final state vector.
    pub final_ket: Vec<C64>,
}

/// Ensemble result: the averaged record plus every trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryResult {
    /// Ensemble-averaged expectations, packaged like a master-equation run.
    pub mean: EvolutionRecord,
    /// Individual trajectories, in trajectory-index order.
    pub trajectories: Vec<TrajectoryRecord>,
}

/// Bisection iterations used to locate a norm crossing inside a substep.
const JUMP_BISECTIONS: usize = 60;

struct EffectiveGenerator<'a> {
    h: &'a ComplexMatrix,
    collapse: &'a [ComplexMatrix],
    cdc: Vec<ComplexMatrix>,
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn normalize(v: &mut [C64]) {
    let n = norm2(v).sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

impl<'a> EffectiveGenerator<'a> {
    fn new(h: &'a ComplexMatrix, collapse: &'a [ComplexMatrix]) -> Result<Self> {
        let cdc = collapse
            .iter()
            .map(|c| c.adjoint().matmul(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(EffectiveGenerator { h, collapse, cdc })
    }

    /// d psi = (-i H - sum_k c_k^dag c_k / 2) psi.
    ///
    /// Dimensions are validated once at entry to `evolve_trajectories`, so
    /// the per-step products cannot fail.
    fn deriv(&self, psi: &[C64]) -> Vec<C64> {
        let mut out = self.h.matvec(psi).expect("dimensions validated at entry");
        for z in out.iter_mut() {
            *z *= im(-1.0);
        }
        for cdc in &self.cdc {
            let damp = cdc.matvec(psi).expect("dimensions validated at entry");
            for (o, d) in out.iter_mut().zip(damp) {
                *o -= 0.5 * d;
            }
        }
        out
    }

    fn rk4_step(&self, psi: &[C64], dt: f64) -> Vec<C64> {
        let k1 = self.deriv(psi);
        let y2: Vec<C64> =
            psi.iter().zip(&k1).map(|(p, k)| p + 0.5 * dt * k).collect();
        let k2 = self.deriv(&y2);
        let y3: Vec<C64> =
            psi.iter().zip(&k2).map(|(p, k)| p + 0.5 * dt * k).collect();
        let k3 = self.deriv(&y3);
        let y4: Vec<C64> = psi.iter().zip(&k3).map(|(p, k)| p + dt * k).collect();
        let k4 = self.deriv(&y4);
        psi.iter()
            .enumerate()
            .map(|(i, p)| p + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    }

    fn frequency_bound(&self) -> f64 {
        self.h.gershgorin_bound() + self.cdc.iter().map(|m| m.gershgorin_bound()).sum::<f64>()
    }
}

fn run_single(
    gen: &EffectiveGenerator,
    psi0: &[C64],
    times: &[f64],
    observables: &[Observable],
    dt_plan: f64,
    seed: u64,
    idx: u64,
) -> Result<TrajectoryRecord> {
    let mut rng = rng_for(seed, idx);
    let mut psi: Vec<C64> = psi0.to_vec();
    let mut threshold: f64 = rng.gen::<f64>();
    let mut jumps = Vec::new();
    let mut expectations: Vec<Vec<C64>> =
        vec![Vec::with_capacity(times.len()); observables.len()];

    let record = |psi: &[C64], expectations: &mut Vec<Vec<C64>>| {
        let mut unit = psi.to_vec();
        normalize(&mut unit);
        for (k, (_, op)) in observables.iter().enumerate() {
            let opv = op.matvec(&unit).expect("dimensions validated at entry");
            let val: C64 = unit.iter().zip(opv).map(|(a, b)| a.conj() * b).sum();
            expectations[k].push(val);
        }
    };

    record(&psi, &mut expectations);
    for w in times.windows(2) {
        let gap = w[1] - w[0];
        let n_sub = (gap / dt_plan).ceil().max(1.0) as u64;
        let h_step = gap / n_sub as f64;
        let mut t = w[0];
        for _ in 0..n_sub {
            let before = psi.clone();
            let mut after = gen.rk4_step(&before, h_step);
            // Possibly several jumps inside one substep: locate and apply
            // each crossing in order, restarting from the jump point.
            let mut frac_done = 0.0;
            while norm2(&after) <= threshold {
                // Bisect the crossing point within (frac_done, 1].
                let mut lo = 0.0_f64;
                let mut hi = 1.0_f64 - frac_done;
                let base = psi.clone();
                for _ in 0..JUMP_BISECTIONS {
                    let mid = 0.5 * (lo + hi);
                    let trial = gen.rk4_step(&base, h_step * mid);
                    if norm2(&trial) <= threshold {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let cross = 0.5 * (lo + hi);
                let at_jump = gen.rk4_step(&base, h_step * cross);
                frac_done += cross * (1.0 - frac_done);
                let t_jump = t + h_step * frac_done;

                // Channel proportional to ||c_k psi||^2.
                let weights: Vec<f64> = gen
                    .collapse
                    .iter()
                    .map(|c| {
                        norm2(&c.matvec(&at_jump).expect("dimensions validated at entry"))
                    })
                    .collect();
                let total: f64 = weights.iter().sum();
                if total.is_nan() || total <= 0.0 {
                    return Err(Error::AccuracyCheckFailed(
                        "norm crossed the jump threshold but all channel weights vanish".into(),
                    ));
                }
                let mut pick = rng.gen::<f64>() * total;
                let mut channel = weights.len() - 1;
                for (k, wgt) in weights.iter().enumerate() {
                    if pick < *wgt {
                        channel = k;
                        break;
                    }
                    pick -= wgt;
                }
                jumps.push(JumpEvent { time: t_jump, channel });

                let mut jumped = gen.collapse[channel]
                    .matvec(&at_jump)
                    .expect("dimensions validated at entry");
                normalize(&mut jumped);
                threshold = rng.gen::<f64>();
                psi = jumped;
                // Finish the remainder of the substep from the jump point.
                after = gen.rk4_step(&psi, h_step * (1.0 - frac_done));
            }
            psi = after;
            t += h_step;
        }
        record(&psi, &mut expectations);
    }

    normalize(&mut psi);
    Ok(TrajectoryRecord { expectations, jumps, final_ket: psi })
}

/// Unravel the master equation into `n_traj` stochastic pure-state
/// trajectories and average them.
///
/// The initial state must be a ket; mixed-state unraveling is out of scope.
/// Results are reproducible for a fixed `seed` and independent of the number
/// of worker threads.
pub fn evolve_trajectories(
    h: &ComplexMatrix,
    collapse: &[ComplexMatrix],
    state0: &QuantumState,
    times: &[f64],
    observables: &[Observable],
    n_traj: usize,
    seed: u64,
) -> Result<TrajectoryResult> {
    let psi0: Vec<C64> = match state0.ket() {
        Some(v) => v.to_vec(),
        None => {
            return Err(Error::InvalidArgument(
                "trajectory unraveling requires a pure-state (ket) input".into(),
            ))
        }
    };
    if n_traj == 0 {
        return Err(Error::InvalidArgument("need at least one trajectory".into()));
    }
    let dim = state0.dim();
    if h.nrows() != dim || h.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian is {}x{} but the state has dimension {dim}",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = h.max_abs().max(1.0);
    if !h.is_hermitian(1e-9 * scale) {
        return Err(Error::NotHermitian { deviation: h.hermiticity_deviation() });
    }
    for m in collapse.iter().chain(observables.iter().map(|(_, op)| op)) {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{} but the state has dimension {dim}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "output times must be finite and strictly increasing (at least two)".into(),
        ));
    }

    let gen = EffectiveGenerator::new(h, collapse)?;
    let horizon = times[times.len() - 1] - times[0];
    let dt_plan = plan_substep(gen.frequency_bound(), horizon)?;

    let trajectories: Vec<TrajectoryRecord> = (0..n_traj as u64)
        .into_par_iter()
        .map(|i| run_single(&gen, &psi0, times, observables, dt_plan, seed, i))
        .collect::<Result<Vec<_>>>()?;

    // Index-ordered ensemble mean.
    let mut mean_series: Vec<Vec<C64>> =
        vec![vec![C64::new(0.0, 0.0); times.len()]; observables.len()];
    for tr in &trajectories {
        for (k, series) in tr.expectations.iter().enumerate() {
            for (acc, v) in mean_series[k].iter_mut().zip(series) {
                *acc += v;
            }
        }
    }
    let inv = re(1.0 / n_traj as f64);
    for series in &mut mean_series {
        for v in series.iter_mut() {
            *v *= inv;
        }
    }

    // Ensemble-averaged final density matrix (for the mean record's state).
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for tr in &trajectories {
        for (i, a) in tr.final_ket.iter().enumerate() {
            for (j, b) in tr.final_ket.iter().enumerate() {
                let cur = rho.get(i, j);
                rho.set(i, j, cur + a * b.conj() * inv);
            }
        }
    }
    let rho = rho.add(&rho.adjoint())?.scale(re(0.5));
    let tr_norm = rho.trace()?.re;
    let rho = rho.scale(re(1.0 / tr_norm));
    let final_state = QuantumState::from_density(state0.layout(), rho)?;

    let steps: u64 = trajectories.len() as u64
        * times
            .windows(2)
            .map(|w| ((w[1] - w[0]) / dt_plan).ceil().max(1.0) as u64)
            .sum::<u64>();

    let mean = EvolutionRecord {
        times: times.to_vec(),
        observable_names: observables.iter().map(|(n, _)| n.clone()).collect(),
        expectations: mean_series,
        final_state,
        trace_drift: 0.0,
        hermiticity_drift: 0.0,
        steps_taken: steps,
        convergence_error: None,
    };

    Ok(TrajectoryResult { mean, trajectories })
}
