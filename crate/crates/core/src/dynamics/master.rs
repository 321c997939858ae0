//! Fixed-step fourth-order Runge-Kutta integration of the Lindblad master
//! equation
//!
//! ```text
//! d rho/dt = -i [H, rho] + sum_k ( c_k rho c_k^dag
//!                                  - (c_k^dag c_k rho + rho c_k^dag c_k) / 2 )
//! ```
//!
//! with `H` in rad/s. The step size is chosen from a Gershgorin bound on the
//! generator's fastest frequency: `dt = min(1 / (50 f_max), T / 2000)`, so at
//! least fifty substeps resolve the fastest oscillation and at least two
//! thousand cover the horizon. Each output-grid interval is subdivided
//! internally; expectation values are recorded exactly on the caller's grid.

use crate::dynamics::record::{EvolutionRecord, QuantumState};
use crate::error::{Error, Result};
use crate::linalg::{im, re, ComplexMatrix, C64};

/// Hard cap on the Hilbert-space dimension for density-matrix integration.
pub const MAX_DYNAMICS_DIM: usize = 4096;

/// Cap on internal substeps per run; beyond this the generator is considered
/// stiff for a fixed-step method.
const MAX_TOTAL_SUBSTEPS: u64 = 50_000_000;

/// Integration options.
#[derive(Debug, Clone, Copy)]
pub struct MasterOptions {
    /// Re-run with halved substeps and record the disagreement of the final
    /// expectations; fail if it exceeds `convergence_tol`.
    pub convergence_check: bool,
    /// Relative tolerance for the half-step self-check.
    pub convergence_tol: f64,
}

impl Default for MasterOptions {
    fn default() -> Self {
        MasterOptions { convergence_check: false, convergence_tol: 1e-6 }
    }
}

/// Named observable: (name, operator).
pub type Observable = (String, ComplexMatrix);

struct Generator<'a> {
    h: &'a ComplexMatrix,
    collapse: &'a [ComplexMatrix],
    /// Precomputed c_k^dag and c_k^dag c_k.
    c_dag: Vec<ComplexMatrix>,
    cdc: Vec<ComplexMatrix>,
}

impl<'a> Generator<'a> {
    fn new(h: &'a ComplexMatrix, collapse: &'a [ComplexMatrix]) -> Result<Self> {
        let c_dag: Vec<ComplexMatrix> = collapse.iter().map(|c| c.adjoint()).collect();
        let cdc: Vec<ComplexMatrix> = collapse
            .iter()
            .zip(&c_dag)
            .map(|(c, cd)| cd.matmul(c))
            .collect::<Result<_>>()?;
        Ok(Generator { h, collapse, c_dag, cdc })
    }

    /// Lindblad right-hand side.
    fn rhs(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let h_rho = self.h.matmul(rho)?;
        let rho_h = rho.matmul(self.h)?;
        let mut out = h_rho.sub(&rho_h)?.scale(im(-1.0)).to_dense();
        for ((c, cd), cdc) in self.collapse.iter().zip(&self.c_dag).zip(&self.cdc) {
            let jump = c.matmul(rho)?.matmul(cd)?;
            out.axpy(re(1.0), &jump)?;
            out.axpy(re(-0.5), &cdc.matmul(rho)?)?;
            out.axpy(re(-0.5), &rho.matmul(cdc)?)?;
        }
        Ok(out)
    }

    /// Gershgorin bound (rad/s) on the fastest frequency in the generator:
    /// Hamiltonian spectral bound plus the summed decay-rate bounds.
    fn frequency_bound(&self) -> f64 {
        self.h.gershgorin_bound() + self.cdc.iter().map(|m| m.gershgorin_bound()).sum::<f64>()
    }

    /// One classic RK4 step of width `dt`.
    fn rk4_step(&self, rho: &ComplexMatrix, dt: f64) -> Result<ComplexMatrix> {
        let k1 = self.rhs(rho)?;
        let mut tmp = rho.to_dense();
        tmp.axpy(re(0.5 * dt), &k1)?;
        let k2 = self.rhs(&tmp)?;
        let mut tmp = rho.to_dense();
        tmp.axpy(re(0.5 * dt), &k2)?;
        let k3 = self.rhs(&tmp)?;
        let mut tmp = rho.to_dense();
        tmp.axpy(re(dt), &k3)?;
        let k4 = self.rhs(&tmp)?;
        let mut out = rho.to_dense();
        out.axpy(re(dt / 6.0), &k1)?;
        out.axpy(re(dt / 3.0), &k2)?;
        out.axpy(re(dt / 3.0), &k3)?;
        out.axpy(re(dt / 6.0), &k4)?;
        Ok(out)
    }
}

fn validate_inputs(
    h: &ComplexMatrix,
    collapse: &[ComplexMatrix],
    state: &QuantumState,
    times: &[f64],
) -> Result<()> {
    let dim = state.dim();
    if dim > MAX_DYNAMICS_DIM {
        return Err(Error::SubsystemTooLarge { dim, limit: MAX_DYNAMICS_DIM });
    }
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
    for c in collapse {
        if c.nrows() != dim || c.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "collapse operator is {}x{} but the state has dimension {dim}",
                c.nrows(),
                c.ncols()
            )));
        }
    }
    if times.len() < 2 {
        return Err(Error::InvalidArgument("need at least two output times".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || !times.iter().all(|t| t.is_finite()) {
        return Err(Error::InvalidArgument("output times must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Substep width from the fastest-frequency rule; `Err` when the fixed-step
/// plan would be unaffordably stiff.
pub(crate) fn plan_substep(freq_bound_rad: f64, horizon: f64) -> Result<f64> {
    let f_max_hz = freq_bound_rad / std::f64::consts::TAU;
    let dt_rate = if f_max_hz > 0.0 { 1.0 / (50.0 * f_max_hz) } else { f64::INFINITY };
    let dt = dt_rate.min(horizon / 2000.0);
    if dt.is_nan() || dt < 1e-18 {
        return Err(Error::Stiffness(format!(
            "planned substep {dt:.3e}s underflows for horizon {horizon:.3e}s"
        )));
    }
    if horizon / dt > MAX_TOTAL_SUBSTEPS as f64 {
        return Err(Error::Stiffness(format!(
            "fixed-step plan needs {:.1e} substeps (fastest frequency {:.3e} Hz over {horizon:.3e}s)",
            horizon / dt,
            f_max_hz
        )));
    }
    Ok(dt)
}

/// Expectation series, final density matrix, trace drift, hermiticity
/// drift, and substep count of one fixed-step integration.
type IntegrationOutput = (Vec<Vec<C64>>, ComplexMatrix, f64, f64, u64);

fn integrate_once(
    gen: &Generator,
    rho0: &ComplexMatrix,
    times: &[f64],
    observables: &[Observable],
    dt_plan: f64,
) -> Result<IntegrationOutput> {
    let mut rho = rho0.to_dense();
    let mut series: Vec<Vec<C64>> = vec![Vec::with_capacity(times.len()); observables.len()];
    let mut trace_drift: f64 = 0.0;
    let mut herm_drift: f64 = 0.0;
    let mut steps: u64 = 0;

    let record = |rho: &ComplexMatrix,
                      series: &mut Vec<Vec<C64>>,
                      trace_drift: &mut f64,
                      herm_drift: &mut f64|
     -> Result<()> {
        for (k, (_, op)) in observables.iter().enumerate() {
            series[k].push(rho.matmul(op)?.trace()?);
        }
        *trace_drift = trace_drift.max((rho.trace()?.re - 1.0).abs() + rho.trace()?.im.abs());
        *herm_drift = herm_drift.max(rho.hermiticity_deviation());
        Ok(())
    };

    record(&rho, &mut series, &mut trace_drift, &mut herm_drift)?;
    for w in times.windows(2) {
        let gap = w[1] - w[0];
        let n_sub = (gap / dt_plan).ceil().max(1.0) as u64;
        let h_step = gap / n_sub as f64;
        for _ in 0..n_sub {
            rho = gen.rk4_step(&rho, h_step)?;
            steps += 1;
        }
        record(&rho, &mut series, &mut trace_drift, &mut herm_drift)?;
    }
    Ok((series, rho, trace_drift, herm_drift, steps))
}

/// Integrate the Lindblad master equation with default options.
pub fn evolve_master(
    h: &ComplexMatrix,
    collapse: &[ComplexMatrix],
    state0: &QuantumState,
    times: &[f64],
    observables: &[Observable],
) -> Result<EvolutionRecord> {
    evolve_master_opts(h, collapse, state0, times, observables, MasterOptions::default())
}

/// Integrate the Lindblad master equation.
///
/// `state0` may be a ket (converted to its projector) or a density matrix.
/// With `convergence_check` on, the run is repeated at half the substep and
/// the largest final-expectation disagreement is recorded; a disagreement
/// above `convergence_tol` (relative to the observable scale) fails.
pub fn evolve_master_opts(
    h: &ComplexMatrix,
    collapse: &[ComplexMatrix],
    state0: &QuantumState,
    times: &[f64],
    observables: &[Observable],
    opts: MasterOptions,
) -> Result<EvolutionRecord> {
    validate_inputs(h, collapse, state0, times)?;
    let gen = Generator::new(h, collapse)?;
    let horizon = times[times.len() - 1] - times[0];
    let dt_plan = plan_substep(gen.frequency_bound(), horizon)?;
    let rho0 = state0.density();

    let (series, rho, trace_drift, herm_drift, steps) =
        integrate_once(&gen, &rho0, times, observables, dt_plan)?;

    let mut convergence_error = None;
    if opts.convergence_check {
        let (series_half, ..) = integrate_once(&gen, &rho0, times, observables, dt_plan / 2.0)?;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for (a, b) in series.iter().zip(&series_half) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((*x - *y).norm());
                scale = scale.max(x.norm());
            }
        }
        let rel = worst / scale;
        if rel > opts.convergence_tol {
            return Err(Error::AccuracyCheckFailed(format!(
                "half-step expectations disagree by {rel:.3e} (tolerance {:.1e})",
                opts.convergence_tol
            )));
        }
        convergence_error = Some(rel);
    }

    // Renormalize the trace before handing the final state back; drift is
    // reported separately so callers can judge it.
    let tr = rho.trace()?.re;
    let final_rho = rho.scale(re(1.0 / tr));
    // Symmetrize roundoff-level Hermiticity error.
    let final_rho = final_rho.add(&final_rho.adjoint())?.scale(re(0.5));
    let final_state = QuantumState::from_density(state0.layout(), final_rho)?;

    Ok(EvolutionRecord {
        times: times.to_vec(),
        observable_names: observables.iter().map(|(n, _)| n.clone()).collect(),
        expectations: series,
        final_state,
        trace_drift,
        hermiticity_drift: herm_drift,
        steps_taken: steps,
        convergence_error,
    })
}
