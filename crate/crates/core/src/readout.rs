//! Dispersive single-qubit readout: resonator pointer dynamics, integrated
//! I/Q amplitudes, Gaussian shot clouds, and separation fidelity.
//!
//! The measured qubit is the flux-tunable one. In the frame rotating at the
//! drive (set on the bare resonator frequency), the readout model is the
//! cross-Kerr dispersive Hamiltonian
//!
//! ```text
//! H = Delta_ra n_ro + chi z_q n_ro + eps (a + a^dag),    chi = g^2 / Delta,
//! ```
//!
//! with `Delta = omega_tunable(flux) - omega_readout` and `Delta_ra = 0` for
//! an on-resonance drive. The two qubit states pull the resonator in opposite
//! directions, so the time-integrated `<a(t)>` lands on two pointer means
//! `mu0`, `mu1` in the I/Q plane. Classical measurement noise is a single
//! knob `kappa_snr`: isotropic Gaussian clouds of standard deviation
//! `sigma = kappa_snr * reference separation` are thrown around the means and
//! classified with the optimal linear threshold, giving the empirical
//! fidelity next to the analytic value `Phi(|mu1 - mu0| / (2 sigma))`.
//!
//! The noise reference is pinned at a fixed calibration bias
//! ([`CALIBRATION_FLUX`]): scaling sigma by each working point's own
//! separation would cancel the separation out of the fidelity entirely, and
//! the whole point of biasing elsewhere is that a larger dispersive contrast
//! genuinely improves readout.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::device::{
    build_collapse_ops, tunable_freq, DeviceParams, ModeLabel, NoiseParams, SubsystemSelector,
};
use crate::dynamics::{evolve_master, EvolutionRecord, QuantumState};
use crate::error::{Error, Result};
use crate::linalg::{destroy, embed, number, re, z_like};
use crate::util::{derive_seed, linspace, normal_cdf, rng_for};

/// Measurement integration window (s): more than ten resonator ring-up times
/// at the slowest readout linewidth in the design table.
pub const T_INT: f64 = 500e-9;

/// Output-grid points across the integration window.
pub const READOUT_GRID_POINTS: usize = 501;

/// Flux bias at which the noise scale is calibrated.
pub const CALIBRATION_FLUX: f64 = 0.70;

/// Pointer means of the two qubit states in the I/Q plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IQRecord {
    /// Integrated amplitude with the qubit in its ground state.
    pub mu0: (f64, f64),
    /// Integrated amplitude with the qubit excited.
    pub mu1: (f64, f64),
    /// Integration window (s).
    pub t_int: f64,
}

impl IQRecord {
    pub fn new(mu0: (f64, f64), mu1: (f64, f64), t_int: f64) -> Result<Self> {
        let rec = IQRecord { mu0, mu1, t_int };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.mu0.0, self.mu0.1, self.mu1.0, self.mu1.1, self.t_int];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("I/Q record has non-finite entries".into()));
        }
        if self.t_int <= 0.0 {
            return Err(Error::InvalidArgument(
                "integration window must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Euclidean distance between the two pointer means.
    pub fn separation(&self) -> f64 {
        let dx = self.mu1.0 - self.mu0.0;
        let dy = self.mu1.1 - self.mu0.1;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Gaussian measurement-shot clouds around the two pointer means.
#[derive(Debug, Clone)]
pub struct ShotCloud {
    pub mu0: (f64, f64),
    pub mu1: (f64, f64),
    /// Shots recorded with the qubit prepared in ground / excited state.
    pub shots0: Vec<(f64, f64)>,
    pub shots1: Vec<(f64, f64)>,
    /// Noise knob: sigma as a fraction of the reference separation.
    pub kappa_snr: f64,
    /// Per-axis noise standard deviation (same units as the means).
    pub sigma: f64,
    pub seed: u64,
}

impl ShotCloud {
    /// CSV with one `state,i,q` row per shot.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("state,i,q\n");
        for (i, q) in &self.shots0 {
            out.push_str(&format!("0,{i},{q}\n"));
        }
        for (i, q) in &self.shots1 {
            out.push_str(&format!("1,{i},{q}\n"));
        }
        out
    }
}

/// Separation-fidelity estimate from a shot cloud.
#[derive(Debug, Clone, Copy)]
pub struct FidelityEstimate {
    /// `Phi(separation / (2 sigma))` for equal priors and equal covariance.
    pub analytic: f64,
    /// Fraction of shots on the correct side of the midpoint threshold.
    pub empirical: f64,
    /// Unit vector from `mu0` towards `mu1` (the optimal projection axis).
    pub axis: (f64, f64),
    /// Midpoint of the two means: the decision threshold lives here.
    pub midpoint: (f64, f64),
    /// Total shots scored.
    pub n_shots: usize,
}

impl FidelityEstimate {
    /// Binomial standard error of the empirical fidelity.
    pub fn standard_error(&self) -> f64 {
        if self.n_shots == 0 {
            return 0.0;
        }
        (self.empirical * (1.0 - self.empirical) / self.n_shots as f64).sqrt()
    }
}

/// One point of a fidelity-versus-noise curve.
#[derive(Debug, Clone, Copy)]
pub struct SnrCurvePoint {
    pub kappa_snr: f64,
    pub estimate: FidelityEstimate,
}

/// CSV with one `kappa,analytic,empirical,stderr` row per grid point.
pub fn snr_curve_to_csv(points: &[SnrCurvePoint]) -> String {
    let mut out = String::from("kappa_snr,analytic,empirical,stderr\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            p.kappa_snr,
            p.estimate.analytic,
            p.estimate.empirical,
            p.estimate.standard_error()
        ));
    }
    out
}

/// Dispersive shift `chi = g^2 / Delta` of the readout resonator (rad/s).
///
/// Fails when the qubit-resonator detuning is inside ten couplings: the
/// dispersive expansion is meaningless there.
pub fn dispersive_shift(params: &DeviceParams) -> Result<f64> {
    let g = params.bare_g_tun;
    let delta = tunable_freq(params, params.flux) - params.readout_freq;
    if delta == 0.0 || delta.abs() < 10.0 * g.abs() {
        return Err(Error::DispersiveViolation(format!(
            "qubit-resonator detuning {:.3e} rad/s is within 10x the coupling {:.3e} rad/s",
            delta, g
        )));
    }
    Ok(g * g / delta)
}

/// Drive the readout resonator for the full window with the qubit held in
/// `|0>` or `|1>`, recording `<a(t)>`.
pub fn simulate_pointer(
    params: &DeviceParams,
    noise: &NoiseParams,
    excited: bool,
) -> Result<EvolutionRecord> {
    params.validate()?;
    noise.validate()?;
    let chi = dispersive_shift(params)?;
    let sel = SubsystemSelector::new(vec![(ModeLabel::Tunable, 2), (ModeLabel::Readout, 4)])?;
    let layout = sel.layout();

    let n_ro = embed(&number(4), "ro", &layout)?;
    let z_q = embed(&z_like(2), "tun", &layout)?;
    let a_ro = embed(&destroy(4), "ro", &layout)?;

    // Drive frame on the bare resonator: Delta_ra = 0, the qubit-state pull
    // +/- chi is the only detuning left.
    let mut h = z_q.matmul(&n_ro)?.scale(re(chi)).to_dense();
    let drive = a_ro.add(&a_ro.adjoint())?;
    h.axpy(re(params.drive_amp), &drive)?;

    let collapse = build_collapse_ops(noise, &sel)?;
    let state0 = QuantumState::basis_ket(&layout, &[usize::from(excited), 0])?;
    let times = linspace(0.0, T_INT, READOUT_GRID_POINTS);
    let observables = vec![("a".to_string(), a_ro)];
    evolve_master(&h, &collapse, &state0, &times, &observables)
}

/// Trapezoid-rule integral of the recorded `<a(t)>` over `[0, t_int]`.
///
/// `I` integrates the real part and `Q` the imaginary part. If `t_int` falls
/// between grid points the final segment is linearly interpolated.
pub fn integrate_iq(record: &EvolutionRecord, t_int: f64) -> Result<(f64, f64)> {
    let series = record
        .expectation("a")
        .ok_or_else(|| Error::InvalidArgument("record has no observable named \"a\"".into()))?;
    let times = &record.times;
    if t_int <= times[0] {
        return Err(Error::InvalidArgument(
            "integration window must extend past the first sample".into(),
        ));
    }
    let last = *times.last().expect("record carries at least one time");
    if t_int > last * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "integration window {t_int:.3e}s runs past the recorded horizon {last:.3e}s"
        )));
    }

    let mut i_acc = 0.0;
    let mut q_acc = 0.0;
    for (w, vals) in times.windows(2).zip(series.windows(2)) {
        let (t0, t1) = (w[0], w[1]);
        if t0 >= t_int {
            break;
        }
        let (v0, v1) = (vals[0], vals[1]);
        if t1 <= t_int {
            let dt = t1 - t0;
            i_acc += 0.5 * (v0.re + v1.re) * dt;
            q_acc += 0.5 * (v0.im + v1.im) * dt;
        } else {
            // Partial final segment: interpolate the value at t_int.
            let frac = (t_int - t0) / (t1 - t0);
            let vr = v0.re + frac * (v1.re - v0.re);
            let vi = v0.im + frac * (v1.im - v0.im);
            let dt = t_int - t0;
            i_acc += 0.5 * (v0.re + vr) * dt;
            q_acc += 0.5 * (v0.im + vi) * dt;
            break;
        }
    }
    Ok((i_acc, q_acc))
}

/// Pointer means for both prepared states at the working point of `params`.
pub fn pointer_record(params: &DeviceParams, noise: &NoiseParams) -> Result<IQRecord> {
    let rec0 = simulate_pointer(params, noise, false)?;
    let rec1 = simulate_pointer(params, noise, true)?;
    let mu0 = integrate_iq(&rec0, T_INT)?;
    let mu1 = integrate_iq(&rec1, T_INT)?;
    IQRecord::new(mu0, mu1, T_INT)
}

/// Pointer-mean separation at the calibration bias; this is what `sigma`
/// scales against everywhere.
pub fn reference_separation(params: &DeviceParams, noise: &NoiseParams) -> Result<f64> {
    let calibrated = params.with_flux(CALIBRATION_FLUX);
    let sep = pointer_record(&calibrated, noise)?.separation();
    if sep <= 0.0 {
        return Err(Error::DegenerateSeparation(
            "pointer means coincide at the calibration bias".into(),
        ));
    }
    Ok(sep)
}

/// Sample Gaussian shot clouds with `sigma` scaled by this record's own
/// separation.
pub fn sample_shots(
    iq: &IQRecord,
    kappa_snr: f64,
    n_shots: usize,
    seed: u64,
) -> Result<ShotCloud> {
    sample_shots_with_reference(iq, kappa_snr, iq.separation(), n_shots, seed)
}

/// Sample Gaussian shot clouds with `sigma = kappa_snr * ref_separation`.
pub fn sample_shots_with_reference(
    iq: &IQRecord,
    kappa_snr: f64,
    ref_separation: f64,
    n_shots: usize,
    seed: u64,
) -> Result<ShotCloud> {
    iq.validate()?;
    if kappa_snr <= 0.0 || !kappa_snr.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noise fraction must be positive and finite, got {kappa_snr}"
        )));
    }
    if n_shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot per state".into()));
    }
    if ref_separation <= 0.0 {
        return Err(Error::DegenerateSeparation(
            "reference separation must be positive to set the noise scale".into(),
        ));
    }
    let sigma = kappa_snr * ref_separation;
    let draw = |mu: (f64, f64), stream: u64| -> Vec<(f64, f64)> {
        let mut rng = rng_for(seed, stream);
        (0..n_shots)
            .map(|_| {
                let di: f64 = rng.sample(StandardNormal);
                let dq: f64 = rng.sample(StandardNormal);
                (mu.0 + sigma * di, mu.1 + sigma * dq)
            })
            .collect()
    };
    Ok(ShotCloud {
        mu0: iq.mu0,
        mu1: iq.mu1,
        shots0: draw(iq.mu0, 0),
        shots1: draw(iq.mu1, 1),
        kappa_snr,
        sigma,
        seed,
    })
}

/// Score a shot cloud with the optimal linear classifier.
///
/// Shots are projected onto the unit vector from `mu0` to `mu1` and split at
/// the projected midpoint; the analytic fidelity is
/// `Phi(separation / (2 sigma))`. Coinciding means give the indistinguishable
/// result 0.5 rather than an error.
pub fn classify_and_score(cloud: &ShotCloud) -> Result<FidelityEstimate> {
    if cloud.shots0.is_empty() || cloud.shots1.is_empty() {
        return Err(Error::InvalidArgument("shot cloud has an empty side".into()));
    }
    let n_shots = cloud.shots0.len() + cloud.shots1.len();
    let dx = cloud.mu1.0 - cloud.mu0.0;
    let dy = cloud.mu1.1 - cloud.mu0.1;
    let sep = (dx * dx + dy * dy).sqrt();
    let midpoint = (0.5 * (cloud.mu0.0 + cloud.mu1.0), 0.5 * (cloud.mu0.1 + cloud.mu1.1));
    if sep == 0.0 {
        return Ok(FidelityEstimate {
            analytic: 0.5,
            empirical: 0.5,
            axis: (1.0, 0.0),
            midpoint,
            n_shots,
        });
    }
    let axis = (dx / sep, dy / sep);
    let project = |p: &(f64, f64)| p.0 * axis.0 + p.1 * axis.1;
    let threshold = midpoint.0 * axis.0 + midpoint.1 * axis.1;
    let correct0 = cloud.shots0.iter().filter(|p| project(p) < threshold).count();
    let correct1 = cloud.shots1.iter().filter(|p| project(p) >= threshold).count();
    let empirical = (correct0 + correct1) as f64 / n_shots as f64;
    let analytic = normal_cdf(sep / (2.0 * cloud.sigma));
    Ok(FidelityEstimate { analytic, empirical, axis, midpoint, n_shots })
}

/// Readout fidelity as a function of the noise fraction `kappa_snr`.
///
/// The device is evaluated at the calibration bias, so the analytic curve is
/// exactly `Phi(1 / (2 kappa_snr))`; the empirical points carry shot noise.
/// Grid points are evaluated in parallel with per-point derived seeds.
pub fn fidelity_vs_snr(
    params: &DeviceParams,
    noise: &NoiseParams,
    kappa_grid: &[f64],
    n_shots: usize,
    seed: u64,
) -> Result<Vec<SnrCurvePoint>> {
    if kappa_grid.is_empty() {
        return Err(Error::InvalidArgument("noise grid is empty".into()));
    }
    if kappa_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("noise grid must be strictly increasing".into()));
    }
    let calibrated = params.with_flux(CALIBRATION_FLUX);
    let iq = pointer_record(&calibrated, noise)?;
    let ref_sep = iq.separation();
    if ref_sep <= 0.0 {
        return Err(Error::DegenerateSeparation(
            "pointer means coincide at the calibration bias".into(),
        ));
    }
    kappa_grid
        .par_iter()
        .enumerate()
        .map(|(i, &kappa)| {
            let cloud = sample_shots_with_reference(
                &iq,
                kappa,
                ref_sep,
                n_shots,
                derive_seed(seed, i as u64),
            )?;
            Ok(SnrCurvePoint { kappa_snr: kappa, estimate: classify_and_score(&cloud)? })
        })
        .collect()
}

/// Shot clouds and fidelity at the working point of `params`, with the noise
/// scale referenced to the calibration bias.
pub fn iq_clouds(
    params: &DeviceParams,
    noise: &NoiseParams,
    kappa_snr: f64,
    n_shots: usize,
    seed: u64,
) -> Result<(IQRecord, ShotCloud, FidelityEstimate)> {
    let iq = pointer_record(params, noise)?;
    let ref_sep = if (params.flux - CALIBRATION_FLUX).abs() < 1e-12 {
        let sep = iq.separation();
        if sep <= 0.0 {
            return Err(Error::DegenerateSeparation(
                "pointer means coincide at the calibration bias".into(),
            ));
        }
        sep
    } else {
        reference_separation(params, noise)?
    };
    let cloud = sample_shots_with_reference(&iq, kappa_snr, ref_sep, n_shots, seed)?;
    let est = classify_and_score(&cloud)?;
    Ok((iq, cloud, est))
}
