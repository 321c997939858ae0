//! End-to-end acceptance checks.
//!
//! Each test verifies one headline property of the toolkit and prints a
//! single `[PASS]`/`[FAIL]` line naming it (run with `--nocapture` to see
//! the lines for passing tests too). A failing criterion also panics with
//! every collected detail so `cargo test` reports it.

use std::time::{Duration, Instant};

use qchip_core::device::{
    effective_j, DeviceParams, ModeLabel, NoiseParams, Preset, SubsystemSelector, TAU,
};
use qchip_core::dynamics::{evolve_master, evolve_trajectories, QuantumState};
use qchip_core::grover::{
    build_grover_circuit, expected_distribution, run_noisy, sweep_flux, sweep_zeta_j12,
    GroverConfig, GroverTarget, PairModel, BENCHMARK_ANCHOR, BENCHMARK_ROWS,
    BENCHMARK_SHOT_COUNTS,
};
use qchip_core::hardware::{purcell_rate, total_capacitance, translate, CircuitConstants};
use qchip_core::linalg::{
    destroy, eigh, expm_unitary, number, re, ComplexMatrix, SpaceLayout,
};
use qchip_core::pauli::{effective_two_qubit, trotterize, GateKind, Mediator, PairQubit};
use qchip_core::readout::{fidelity_vs_snr, iq_clouds, CALIBRATION_FLUX};
use qchip_core::spectroscopy::{
    find_avoided_crossing, map_from_builder, sweep_spectrum, DEFAULT_BROADENING,
};
use qchip_core::surrogate::{
    generate_dataset, latin_hypercube, optimize, train, Architecture, DatasetProvenance,
    DifferentiablePredictor, OptimizeSettings, OptimizerKind, OptimizerState, ParamDataset,
    Predictor, ReadoutFidelityEvaluator, ScoreSource, SurrogateModel, ThetaSpace, THETA_DIM,
};
use qchip_core::util::linspace;
use qchip_core::{Result, DEFAULT_SEED};

/// Collects failure messages; the criterion passes when none accumulate.
macro_rules! check {
    ($failures:expr, $cond:expr, $($arg:tt)+) => {
        if !($cond) {
            $failures.push(format!($($arg)+));
        }
    };
}

/// Runs one criterion body, prints its verdict line, and panics on failure.
fn run_criterion(
    n: usize,
    description: &str,
    body: impl FnOnce(&mut Vec<String>) -> Result<()>,
) {
    let mut failures = Vec::new();
    if let Err(e) = body(&mut failures) {
        failures.push(format!("aborted early: {e}"));
    }
    if failures.is_empty() {
        println!("[PASS] criterion {n}: {description}");
    } else {
        println!("[FAIL] criterion {n}: {description}");
        for f in &failures {
            println!("        - {f}");
        }
        panic!("criterion {n} ({description}) failed:\n{}", failures.join("\n"));
    }
}

/// Largest singular value of `a - b` (exact operator norm of the error).
fn op_norm_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let d = a.sub(b)?;
    let gram = d.adjoint().matmul(&d)?;
    let (evals, _) = eigh(&gram)?;
    Ok(evals.iter().copied().fold(0.0_f64, f64::max).max(0.0).sqrt())
}

#[test]
fn criterion_01_fidelity_anchor_at_reference_noise() {
    run_criterion(
        1,
        "separation fidelity at kappa_snr 0.2: analytic anchor 0.99379, empirical within 0.005 at 1e5 shots, under 1 min",
        |failures| {
            let start = Instant::now();
            let params = DeviceParams::preset(Preset::Baseline).with_flux(CALIBRATION_FLUX);
            let noise = NoiseParams::default();
            let (_iq, _cloud, est) = iq_clouds(&params, &noise, 0.2, 100_000, DEFAULT_SEED)?;

            // Frozen oracle: standard normal CDF at 2.5.
            let anchor = 0.9937903346742238;
            check!(
                failures,
                (est.analytic - anchor).abs() < 1e-5,
                "analytic fidelity {:.10} differs from the CDF anchor {anchor:.10} by more than 1e-5",
                est.analytic
            );
            check!(
                failures,
                (est.empirical - est.analytic).abs() <= 0.005,
                "empirical fidelity {:.6} is more than 0.005 from analytic {:.6}",
                est.empirical,
                est.analytic
            );
            // Both prepared states are sampled, so the estimate scores
            // twice the requested per-state shot count.
            check!(failures, est.n_shots == 200_000, "estimate scored {} shots", est.n_shots);
            let elapsed = start.elapsed();
            check!(
                failures,
                elapsed < Duration::from_secs(60),
                "took {elapsed:?}, budget is 1 minute"
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_02_fidelity_curve_shape_over_noise_fraction() {
    run_criterion(
        2,
        "fidelity >= 0.993 for every kappa_snr <= 0.18 and decreasing on [0.18, 0.40]",
        |failures| {
            let params = DeviceParams::preset(Preset::Baseline).with_flux(CALIBRATION_FLUX);
            let noise = NoiseParams::default();
            let grid = linspace(0.02, 0.40, 20);
            let curve = fidelity_vs_snr(&params, &noise, &grid, 20_000, DEFAULT_SEED)?;

            for p in &curve {
                if p.kappa_snr <= 0.18 + 1e-12 {
                    check!(
                        failures,
                        p.estimate.analytic >= 0.993,
                        "analytic fidelity {:.5} at kappa {:.2} fell below 0.993",
                        p.estimate.analytic,
                        p.kappa_snr
                    );
                    let floor = 0.993 - 3.0 * p.estimate.standard_error();
                    check!(
                        failures,
                        p.estimate.empirical >= floor,
                        "empirical fidelity {:.5} at kappa {:.2} fell below 0.993 beyond Monte Carlo error",
                        p.estimate.empirical,
                        p.kappa_snr
                    );
                }
            }
            for w in curve.windows(2) {
                if w[0].kappa_snr >= 0.18 - 1e-12 {
                    check!(
                        failures,
                        w[1].estimate.analytic < w[0].estimate.analytic,
                        "analytic fidelity is not strictly decreasing between kappa {:.2} and {:.2}",
                        w[0].kappa_snr,
                        w[1].kappa_snr
                    );
                    let slack =
                        2.0 * (w[0].estimate.standard_error() + w[1].estimate.standard_error());
                    check!(
                        failures,
                        w[1].estimate.empirical <= w[0].estimate.empirical + slack,
                        "empirical fidelity rose from {:.5} to {:.5} between kappa {:.2} and {:.2}, beyond sampling error",
                        w[0].estimate.empirical,
                        w[1].estimate.empirical,
                        w[0].kappa_snr,
                        w[1].kappa_snr
                    );
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_03_avoided_crossing_location_and_half_gap() {
    run_criterion(
        3,
        "avoided crossing at flux 0.82 +/- 0.02 on a 101x121 map; half-gap tracks perturbative exchange within 10% in the dispersive regime, under 5 min",
        |failures| {
            let start = Instant::now();

            // Device map: the tunable transmon sweeps through the interior
            // qubits; the minimum gap must sit at the calibrated flux.
            let params = DeviceParams::preset(Preset::Baseline);
            let sel = SubsystemSelector::new(vec![
                (ModeLabel::Interior(1), 3),
                (ModeLabel::Interior(2), 3),
                (ModeLabel::Tunable, 3),
            ])?;
            let flux = linspace(0.6, 1.1, 101);
            let probe = linspace(TAU * 5.0e9, TAU * 6.2e9, 121);
            let map = sweep_spectrum(&params, &sel, &flux, &probe, DEFAULT_BROADENING)?;
            let crossing = find_avoided_crossing(&map)?;
            check!(
                failures,
                (crossing.flux_at_min_gap - 0.82).abs() <= 0.02,
                "minimum gap found at flux {:.4}, expected 0.82 +/- 0.02",
                crossing.flux_at_min_gap
            );

            // Half-gap versus perturbative exchange on mediated pairs that
            // are far inside the dispersive regime (g/Delta <= 0.15). The
            // probe axis here is dense so the gap readout is not limited by
            // grid quantization.
            let omega_a = TAU * 5.5e9;
            let ladder_set: [(f64, f64, f64); 4] = [
                (TAU * 60.0e6, TAU * 60.0e6, TAU * 1.0e9),
                (TAU * 100.0e6, TAU * 100.0e6, TAU * 1.0e9),
                (TAU * 80.0e6, TAU * 120.0e6, TAU * 1.5e9),
                (TAU * 50.0e6, TAU * 70.0e6, TAU * 0.8e9),
            ];
            for (g_ac, g_bc, offset) in ladder_set {
                let omega_c = omega_a + offset;
                let builder = move |phi: f64| {
                    let omega_b = omega_a + TAU * 1.0e9 * phi;
                    // Single-excitation ladder: ground, qubit a, qubit b,
                    // mediator c.
                    ComplexMatrix::from_row_major(
                        4,
                        4,
                        vec![
                            re(0.0), re(0.0), re(0.0), re(0.0),
                            re(0.0), re(omega_a), re(0.0), re(g_ac),
                            re(0.0), re(0.0), re(omega_b), re(g_bc),
                            re(0.0), re(g_ac), re(g_bc), re(omega_c),
                        ],
                    )
                };
                let flux = linspace(-0.06, 0.06, 121);
                let probe = linspace(TAU * 5.40e9, TAU * 5.56e9, 481);
                let map = map_from_builder(builder, &flux, &probe, TAU * 1.0e6)?;
                let report = find_avoided_crossing(&map)?;
                let j_eff = effective_j(g_ac, g_bc, omega_a - omega_c, omega_a - omega_c)?;
                let half_gap = report.gap / 2.0;
                check!(
                    failures,
                    (half_gap - j_eff.abs()).abs() <= 0.10 * j_eff.abs(),
                    "half-gap {:.4} MHz vs exchange {:.4} MHz (>10% apart) for g/2pi = ({:.0}, {:.0}) MHz, offset {:.1} GHz",
                    half_gap / TAU / 1e6,
                    j_eff.abs() / TAU / 1e6,
                    g_ac / TAU / 1e6,
                    g_bc / TAU / 1e6,
                    offset / TAU / 1e9
                );
            }

            let elapsed = start.elapsed();
            check!(
                failures,
                elapsed < Duration::from_secs(300),
                "took {elapsed:?}, budget is 5 minutes"
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_04_damped_resonator_and_trajectory_agreement() {
    run_criterion(
        4,
        "damped resonator matches exp(-kappa t) to 1e-4; 2000 trajectories match the master equation within 3 standard errors; trace drift < 1e-8",
        |failures| {
            let dim = 4;
            let omega = TAU * 10.0e6;
            let kappa: f64 = 2.0e6;
            let layout = SpaceLayout::from_dims(&[("res", dim)])?;
            let h = number(dim).scale(re(omega));
            let collapse = vec![destroy(dim).scale(re(kappa.sqrt()))];
            let state0 = QuantumState::basis_ket(&layout, &[1])?;
            let times = linspace(0.0, 1.5e-6, 26);
            let observables = vec![("n".to_string(), number(dim))];

            let record = evolve_master(&h, &collapse, &state0, &times, &observables)?;
            let n_of_t = record
                .expectation("n")
                .ok_or_else(|| qchip_core::Error::InvalidArgument("missing observable".into()))?;
            let mut worst = 0.0_f64;
            for (t, n) in times.iter().zip(n_of_t) {
                worst = worst.max((n.re - (-kappa * t).exp()).abs());
            }
            check!(
                failures,
                worst < 1e-4,
                "photon number deviates from exp(-kappa t) by {worst:.2e} (tolerance 1e-4)"
            );
            check!(
                failures,
                record.trace_drift < 1e-8,
                "master-equation trace drift {:.2e} exceeds 1e-8",
                record.trace_drift
            );

            let n_traj = 2000;
            let ensemble =
                evolve_trajectories(&h, &collapse, &state0, &times, &observables, n_traj, DEFAULT_SEED)?;
            let mean = ensemble
                .mean
                .expectation("n")
                .ok_or_else(|| qchip_core::Error::InvalidArgument("missing observable".into()))?;
            for (k, t) in times.iter().enumerate() {
                let master = n_of_t[k].re;
                let samples: Vec<f64> = ensemble
                    .trajectories
                    .iter()
                    .map(|traj| traj.expectations[0][k].re)
                    .collect();
                let m = samples.iter().sum::<f64>() / samples.len() as f64;
                let var = samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
                    / (samples.len() - 1) as f64;
                let se = (var / samples.len() as f64).sqrt();
                let diff = (mean[k].re - master).abs();
                check!(
                    failures,
                    diff <= 3.0 * se + 1e-12,
                    "trajectory mean deviates by {diff:.3e} at t = {t:.2e} s, beyond 3 standard errors ({:.3e})",
                    3.0 * se
                );
            }
            check!(
                failures,
                ensemble.mean.trace_drift < 1e-8,
                "trajectory-ensemble trace drift {:.2e} exceeds 1e-8",
                ensemble.mean.trace_drift
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_05_trotter_error_magnitude_and_first_order_scaling() {
    run_criterion(
        5,
        "Trotterized two-qubit exchange window within 1e-6 of the dense propagator at 64 steps, with first-order error halving",
        |failures| {
            let params = DeviceParams::preset(Preset::Optimized);
            let pair = effective_two_qubit(
                &params,
                PairQubit::Interior(0),
                PairQubit::Tunable,
                Mediator::Auto,
            )?;
            let h = pair.window_hamiltonian()?;
            let dense = h.to_matrix()?;
            // Short enough that 64 first-order slices land under 1e-6 while
            // the remaining error still sits far above the eigensolver noise
            // floor, so the halving ratio is resolvable.
            let t = 5e-11;
            let exact = expm_unitary(&dense, t)?;

            let err_64 = op_norm_diff(&trotterize(&h, t, 64)?.unitary()?, &exact)?;
            let err_128 = op_norm_diff(&trotterize(&h, t, 128)?.unitary()?, &exact)?;

            check!(
                failures,
                err_64 < 1e-6,
                "operator-norm error {err_64:.3e} at 64 steps exceeds 1e-6"
            );
            check!(
                failures,
                err_64 > 1e-9,
                "error {err_64:.3e} at 64 steps is too close to the numerical floor to trust the scaling check"
            );
            let ratio = err_64 / err_128;
            check!(
                failures,
                (1.9..=2.1).contains(&ratio),
                "doubling the step count scaled the error by {ratio:.4}, expected ~2 for a first-order splitting (err64 = {err_64:.3e}, err128 = {err_128:.3e})"
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_06_noiseless_search_is_exact_for_every_target() {
    run_criterion(
        6,
        "noiseless two-qubit search hits every target with accuracy 1.0, matching a brute-force amplitude oracle to 1e-12",
        |failures| {
            for target in GroverTarget::ALL {
                // Independent oracle: replay the synthesized circuit through
                // a four-amplitude simulator with its own gate definitions.
                let circuit = build_grover_circuit(target)?;
                let mut amps = [0.0_f64; 4];
                amps[0] = 1.0;
                for gate in circuit.gates() {
                    match gate.kind {
                        GateKind::Hadamard => {
                            let q = gate.qubits[0];
                            let mask = 1 << (1 - q);
                            let s = 0.5_f64.sqrt();
                            for i in 0..4 {
                                if i & mask == 0 {
                                    let (lo, hi) = (amps[i], amps[i | mask]);
                                    amps[i] = s * (lo + hi);
                                    amps[i | mask] = s * (lo - hi);
                                }
                            }
                        }
                        GateKind::PauliX => {
                            let mask = 1 << (1 - gate.qubits[0]);
                            for i in 0..4 {
                                if i & mask == 0 {
                                    amps.swap(i, i | mask);
                                }
                            }
                        }
                        GateKind::Cz => amps[3] = -amps[3],
                        GateKind::Measure => break,
                        other => {
                            failures.push(format!(
                                "unexpected {} gate in the ideal search circuit",
                                other.name()
                            ));
                            break;
                        }
                    }
                }
                let brute: Vec<f64> = amps.iter().map(|a| a * a).collect();

                let config =
                    GroverConfig::noiseless(target, PairModel::ideal(TAU * 0.7097e6), 4096, DEFAULT_SEED);
                let dist = expected_distribution(&config)?;
                for i in 0..4 {
                    check!(
                        failures,
                        (dist[i] - brute[i]).abs() < 1e-12,
                        "target {}: outcome {i} probability {:.3e} differs from brute force {:.3e}",
                        target.label(),
                        dist[i],
                        brute[i]
                    );
                }
                let result = run_noisy(&config)?;
                check!(
                    failures,
                    result.accuracy == 1.0,
                    "target {}: noiseless accuracy {} is not exactly 1",
                    target.label(),
                    result.accuracy
                );
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_07_calibrated_benchmark_rows_and_shot_stability() {
    run_criterion(
        7,
        "calibrated noisy search reproduces the reference table (anchor 78.08%, others within 3pp, ordered by ZZ strength) and shot-count spread < 1pp, under 10 min",
        |failures| {
            let start = Instant::now();

            let mut measured: Vec<(f64, f64, &str)> = Vec::new();
            for (i, row) in BENCHMARK_ROWS.iter().enumerate() {
                let config = GroverConfig::benchmark(row.zeta, 2048, DEFAULT_SEED);
                let accuracy = 100.0 * run_noisy(&config)?.accuracy;
                measured.push((row.zeta, accuracy, row.name));
                let tolerance = if i == BENCHMARK_ANCHOR { 0.5 } else { 3.0 };
                check!(
                    failures,
                    (accuracy - row.accuracy_percent).abs() <= tolerance,
                    "{}: measured {accuracy:.2}% vs reference {:.2}% (tolerance {tolerance} pp)",
                    row.name,
                    row.accuracy_percent
                );
            }
            measured.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for pair in measured.windows(2) {
                check!(
                    failures,
                    pair[1].1 > pair[0].1,
                    "accuracy ordering broken: {} at {:.2}% >= {} at {:.2}% despite weaker ZZ",
                    pair[0].2,
                    pair[0].1,
                    pair[1].2,
                    pair[1].1
                );
            }

            let anchor = BENCHMARK_ROWS[BENCHMARK_ANCHOR];
            let mut table = Vec::new();
            for shots in BENCHMARK_SHOT_COUNTS {
                let config = GroverConfig::benchmark(anchor.zeta, shots, DEFAULT_SEED);
                table.push(100.0 * run_noisy(&config)?.accuracy);
            }
            let spread = table.iter().copied().fold(f64::MIN, f64::max)
                - table.iter().copied().fold(f64::MAX, f64::min);
            check!(
                failures,
                spread < 1.0,
                "accuracy spread across 512-4096 shots is {spread:.3} pp (limit 1 pp): {table:?}"
            );

            let elapsed = start.elapsed();
            check!(
                failures,
                elapsed < Duration::from_secs(600),
                "took {elapsed:?}, budget is 10 minutes"
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_08_zz_dominance_and_flux_peak() {
    run_criterion(
        8,
        "accuracy is monotone in ZZ strength (2 sigma), ZZ dominates exchange effects, and the flux sweep peaks within 0.05 of 0.8",
        |failures| {
            // Degenerate tuning isolates the two axes: the virtual phase
            // corrections are exact there, so the exchange axis contributes
            // only dissipation-mediated effects while the ZZ axis sets the
            // gate-window length. (A detuned pair instead accumulates an
            // uncorrected exchange-dressed phase ~ 2 J12^2 t / delta that
            // swamps the decoherence signal over the long weak-ZZ windows.)
            let base = GroverConfig::benchmark(TAU * 0.7097e6, 2048, DEFAULT_SEED);
            let zetas: Vec<f64> =
                [0.1e6, 0.2e6, 0.35e6, 0.5e6, 0.7e6, 1.0e6].iter().map(|z| TAU * z).collect();
            let j12s: Vec<f64> = [0.0, 2.15e6, 4.3e6, 6.45e6].iter().map(|j| TAU * j).collect();
            let surface = sweep_zeta_j12(&base, &zetas, &j12s)?;
            let acc = |row: usize, col: usize| surface.points[row * zetas.len() + col].accuracy;

            for row in 0..j12s.len() {
                for col in 1..zetas.len() {
                    let (lo, hi) = (acc(row, col - 1), acc(row, col));
                    let p = 0.5 * (lo + hi);
                    let sigma = (p * (1.0 - p) / 2048.0).sqrt();
                    check!(
                        failures,
                        hi >= lo - 2.0 * sigma,
                        "accuracy fell from {lo:.4} to {hi:.4} when the ZZ strength rose from {:.2} to {:.2} MHz at J12 = {:.2} MHz",
                        zetas[col - 1] / TAU / 1e6,
                        zetas[col] / TAU / 1e6,
                        j12s[row] / TAU / 1e6
                    );
                }
            }

            // Range along the ZZ axis (per exchange row) must exceed the
            // range along the exchange axis at every ZZ strength strong
            // enough for a practical gate window.
            let mut min_zeta_range = f64::MAX;
            for row in 0..j12s.len() {
                let vals: Vec<f64> = (0..zetas.len()).map(|c| acc(row, c)).collect();
                let range = vals.iter().copied().fold(f64::MIN, f64::max)
                    - vals.iter().copied().fold(f64::MAX, f64::min);
                min_zeta_range = min_zeta_range.min(range);
            }
            for (col, &zeta) in zetas.iter().enumerate() {
                if zeta < TAU * 0.25e6 {
                    continue;
                }
                let vals: Vec<f64> = (0..j12s.len()).map(|r| acc(r, col)).collect();
                let range = vals.iter().copied().fold(f64::MIN, f64::max)
                    - vals.iter().copied().fold(f64::MAX, f64::min);
                check!(
                    failures,
                    range < min_zeta_range,
                    "exchange-driven range {range:.4} at zeta = {:.2} MHz reaches the ZZ-driven range {min_zeta_range:.4}",
                    zeta / TAU / 1e6
                );
            }

            // Flux sweep on the device-derived pair: accuracy must peak near
            // the calibrated operating region. The grid starts above the ZZ
            // null near flux 0.765 (there the scheduled gate window diverges
            // toward milliseconds, which the fixed-step integrator cannot
            // afford) and extends past the tolerance window on the right so
            // the peak-location check has genuine competitors.
            let params = DeviceParams::preset(Preset::Optimized);
            let device = |flux: f64| -> Result<PairModel> {
                let pair = effective_two_qubit(
                    &params.with_flux(flux),
                    PairQubit::Interior(0),
                    PairQubit::Tunable,
                    Mediator::Auto,
                )?;
                Ok(PairModel::from_effective(&pair))
            };
            let fluxes = linspace(0.775, 0.875, 11);
            let line = sweep_flux(&GroverConfig::benchmark(TAU * 0.7097e6, 2048, DEFAULT_SEED), &device, &fluxes)?;
            let peak = line
                .points
                .iter()
                .max_by(|a, b| a.accuracy.partial_cmp(&b.accuracy).unwrap())
                .expect("non-empty sweep");
            check!(
                failures,
                (peak.x - 0.8).abs() <= 0.05,
                "accuracy peaks at flux {:.3} (accuracy {:.3}), expected within 0.05 of 0.8",
                peak.x,
                peak.accuracy
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_09_surrogate_gradients_recovery_and_design_improvement() {
    run_criterion(
        9,
        "surrogate input gradients match finite differences (<1e-5), synthetic recovery reaches R^2 > 0.95, and the optimizer beats the starting design by >= 0.001 (simulator-verified)",
        |failures| {
            // Reverse-mode input gradients against central differences.
            for arch in [Architecture::Graph, Architecture::Mlp] {
                let model = SurrogateModel::new(arch, 7);
                let theta: Vec<f64> =
                    (0..THETA_DIM).map(|i| 0.2 + 0.6 * ((i * 37 % 100) as f64) / 100.0).collect();
                let (_, grad) = model.value_and_gradient(&theta)?;
                let scale = grad.iter().fold(0.0_f64, |m, g| m.max(g.abs())).max(1e-12);
                let h = 1e-5;
                let mut max_rel = 0.0_f64;
                for i in 0..THETA_DIM {
                    let mut plus = theta.clone();
                    plus[i] += h;
                    let mut minus = theta.clone();
                    minus[i] -= h;
                    let numeric = (model.predict(&plus)? - model.predict(&minus)?) / (2.0 * h);
                    max_rel = max_rel.max((numeric - grad[i]).abs() / scale);
                }
                check!(
                    failures,
                    max_rel < 1e-5,
                    "{}: worst gradient mismatch {max_rel:.2e} relative to the gradient scale",
                    arch.name()
                );
            }

            // Recovery of a known smooth function with two dominant
            // curvature directions from Latin-hypercube data.
            let target = |theta: &[f64]| {
                let flux = theta[33] - 0.7;
                let bus = theta[32] - 0.4;
                0.85 - 0.5 * flux * flux - 0.4 * bus * bus
            };
            let samples: Vec<(Vec<f64>, f64)> = latin_hypercube(1536, THETA_DIM, 3)?
                .into_iter()
                .map(|theta| {
                    let y = target(&theta);
                    (theta, y)
                })
                .collect();
            let data = ParamDataset::new(samples, DatasetProvenance::default())?;
            let mut model = SurrogateModel::new(Architecture::Graph, 5);
            let mut opt =
                OptimizerState::new(OptimizerKind::Adam, model.n_weights()).with_learning_rate(3e-3)?;
            let synth = train(&mut model, &data, &mut opt, 200, 24, 17)?;
            check!(failures, synth.diverged_at.is_none(), "synthetic training diverged");
            check!(
                failures,
                synth.val_r_squared > 0.95,
                "synthetic validation R^2 = {:.4}, needs > 0.95",
                synth.val_r_squared
            );

            // Full pipeline: label designs with the analytic readout
            // fidelity, train a fresh surrogate, then climb it and verify
            // the best candidate on the simulator.
            let base = DeviceParams::preset(Preset::Baseline);
            let noise = NoiseParams::default();
            let evaluator = ReadoutFidelityEvaluator::new(&base, noise, 0.2)?;
            let space = ThetaSpace::around(&base, 0.2)?;
            let data = generate_dataset(&space, 192, &evaluator, DEFAULT_SEED)?;
            check!(
                failures,
                data.len() >= 150,
                "only {} of 192 sampled designs were scoreable",
                data.len()
            );
            let mut model = SurrogateModel::new(Architecture::Graph, DEFAULT_SEED);
            let mut opt =
                OptimizerState::new(OptimizerKind::Adam, model.n_weights()).with_learning_rate(3e-3)?;
            train(&mut model, &data, &mut opt, 200, 24, DEFAULT_SEED)?;

            let start = space.encode(&base)?;
            let settings = OptimizeSettings::default();
            let outcome = optimize(&model, &space, &start, &settings, &evaluator)?;
            check!(
                failures,
                outcome.score_source == ScoreSource::Simulator,
                "winning score did not come from the simulator"
            );
            check!(
                failures,
                outcome.improved
                    && outcome.simulated_fidelity >= outcome.start_fidelity + 0.001,
                "optimizer moved fidelity from {:.6} to {:.6}; needs an absolute gain of 0.001",
                outcome.start_fidelity,
                outcome.simulated_fidelity
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_10_layout_translation_anchors() {
    run_criterion(
        10,
        "layout translation: total capacitance 96.8 +/- 0.2 fF, Purcell formula reproduces the (3.35 MHz, 2.37 kHz) pair, and the resonator-length discrepancy note is in the report",
        |failures| {
            let c_sigma = total_capacitance(TAU * 200.0e6)?;
            check!(
                failures,
                (c_sigma - 96.8).abs() <= 0.2,
                "total capacitance {c_sigma:.3} fF is outside 96.8 +/- 0.2 fF"
            );

            // Back-solve g/Delta from the quoted (kappa, Purcell) pair, then
            // confirm the closed form returns exactly that Purcell rate.
            let ratio = (2.37e3_f64 / 3.35e6).sqrt();
            let gamma_hz = purcell_rate(ratio, 1.0, TAU * 3.35e6)? / TAU;
            check!(
                failures,
                (gamma_hz - 2370.0).abs() < 1e-6,
                "Purcell rate {gamma_hz:.6} Hz does not reproduce 2.37 kHz at g/Delta = {ratio:.6}"
            );

            let report =
                translate(&DeviceParams::preset(Preset::Optimized), &CircuitConstants::default())?;
            check!(
                failures,
                (report.total_capacitance_ff - 96.8).abs() <= 0.2,
                "report capacitance {:.3} fF is outside 96.8 +/- 0.2 fF",
                report.total_capacitance_ff
            );
            let text = report.to_text();
            check!(
                failures,
                text.contains("match neither half-wave nor quarter-wave"),
                "report text does not document the resonator-length discrepancy"
            );
            Ok(())
        },
    );
}
