//! Flux-versus-probe spectroscopy maps and avoided-crossing extraction.
//!
//! For each flux bias the selected subsystem's Hamiltonian is diagonalized
//! and the transition frequencies out of the ground state are broadened with
//! a Lorentzian line shape; the stacked columns form an intensity map
//! normalized to a global maximum of one. The gap finder locates, per flux
//! column, the two nearest resolved intensity peaks (with sub-grid quadratic
//! refinement) and reports the flux at which their separation is smallest —
//! the avoided crossing whose splitting measures the effective exchange
//! coupling.
//!
//! The map is eigenvalue-based rather than a driven-dissipative steady
//! state: a transition-frequency map needs only the spectrum, and the full
//! dynamics path stays available for spot checks.

use rayon::prelude::*;

use crate::device::{build_hamiltonian, DeviceParams, Frame, SubsystemSelector, TAU};
use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix};

/// Default Lorentzian half-width (rad/s): of the order of the readout
/// linewidth.
pub const DEFAULT_BROADENING: f64 = TAU * 3.0e6;

/// Normalized intensity over a flux x probe-frequency grid.
#[derive(Debug, Clone)]
pub struct SpectroscopyMap {
    /// Flux biases (dimensionless), strictly increasing.
    pub flux_grid: Vec<f64>,
    /// Probe frequencies (rad/s), strictly increasing.
    pub probe_grid: Vec<f64>,
    /// `intensity[i][j]` is the response at `(flux_grid[i], probe_grid[j])`,
    /// normalized so the global maximum is 1.
    pub intensity: Vec<Vec<f64>>,
    /// Lorentzian half-width used to broaden the transitions (rad/s).
    pub broadening: f64,
}

impl SpectroscopyMap {
    /// CSV with one `flux,probe_rad_s,intensity` row per grid point, flux
    /// rows in order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("flux,probe_rad_s,intensity\n");
        for (phi, row) in self.flux_grid.iter().zip(&self.intensity) {
            for (omega, val) in self.probe_grid.iter().zip(row) {
                out.push_str(&format!("{phi},{omega},{val}\n"));
            }
        }
        out
    }
}

/// Result of the avoided-crossing search.
#[derive(Debug, Clone, Copy)]
pub struct CrossingReport {
    /// Flux bias minimizing the branch separation.
    pub flux_at_min_gap: f64,
    /// Minimum branch separation (rad/s).
    pub gap: f64,
    /// The two branch frequencies at the crossing (rad/s), low then high.
    pub branch_low: f64,
    /// Upper branch at the crossing (rad/s).
    pub branch_high: f64,
}

impl CrossingReport {
    /// True when the reported gap is too close to the line width to trust:
    /// merged branches can masquerade as a small splitting.
    pub fn below_broadening_floor(&self, broadening: f64) -> bool {
        self.gap < 2.0 * broadening
    }
}

fn validate_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!(
            "{name} grid must be finite and strictly increasing"
        )));
    }
    Ok(())
}

/// Build a spectroscopy map from an arbitrary flux-dependent Hamiltonian.
///
/// The builder is called once per flux point (in parallel); transitions are
/// energy differences from the ground state.
pub fn map_from_builder<F>(
    builder: F,
    flux_grid: &[f64],
    probe_grid: &[f64],
    broadening: f64,
) -> Result<SpectroscopyMap>
where
    F: Fn(f64) -> Result<ComplexMatrix> + Sync,
{
    validate_grid("flux", flux_grid)?;
    validate_grid("probe", probe_grid)?;
    if !broadening.is_finite() || broadening <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "broadening must be positive and finite, got {broadening}"
        )));
    }

    let gamma2 = broadening * broadening;
    let mut intensity: Vec<Vec<f64>> = flux_grid
        .par_iter()
        .map(|&phi| -> Result<Vec<f64>> {
            let h = builder(phi)?;
            let (evals, _) = eigh(&h)?;
            let e0 = evals[0];
            let transitions: Vec<f64> = evals[1..].iter().map(|e| e - e0).collect();
            Ok(probe_grid
                .iter()
                .map(|&omega| {
                    transitions
                        .iter()
                        .map(|&d| gamma2 / ((omega - d) * (omega - d) + gamma2))
                        .sum()
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let max = intensity
        .iter()
        .flat_map(|row| row.iter().copied())
        .fold(0.0_f64, f64::max);
    if max > 0.0 {
        for row in &mut intensity {
            for v in row.iter_mut() {
                *v /= max;
            }
        }
    }
    Ok(SpectroscopyMap {
        flux_grid: flux_grid.to_vec(),
        probe_grid: probe_grid.to_vec(),
        intensity,
        broadening,
    })
}

/// Sweep the device spectrum over flux and probe frequency.
pub fn sweep_spectrum(
    params: &DeviceParams,
    sel: &SubsystemSelector,
    flux_grid: &[f64],
    probe_grid: &[f64],
    broadening: f64,
) -> Result<SpectroscopyMap> {
    params.validate()?;
    map_from_builder(
        |phi| build_hamiltonian(&params.with_flux(phi), sel, Frame::Lab),
        flux_grid,
        probe_grid,
        broadening,
    )
}

/// Refined frequencies of the local maxima of one intensity column, found by
/// a quadratic fit through each peak sample and its neighbors. Peaks below
/// `floor` (relative to the column maximum) are ignored.
fn column_peaks(probe: &[f64], column: &[f64], floor: f64) -> Vec<f64> {
    let col_max = column.iter().copied().fold(0.0_f64, f64::max);
    let mut peaks = Vec::new();
    if col_max <= 0.0 {
        return peaks;
    }
    for j in 1..column.len() - 1 {
        let (lo, mid, hi) = (column[j - 1], column[j], column[j + 1]);
        if mid > lo && mid >= hi && mid >= floor * col_max {
            // Quadratic vertex through the three samples; clamp the shift to
            // half a cell so a flat shoulder cannot throw the peak outside.
            let denom = lo - 2.0 * mid + hi;
            let shift = if denom.abs() > 0.0 {
                (0.5 * (lo - hi) / denom).clamp(-0.5, 0.5)
            } else {
                0.0
            };
            let h = probe[j + 1] - probe[j];
            peaks.push(probe[j] + shift * h);
        }
    }
    peaks
}

/// Locate the avoided crossing: the flux at which the two nearest resolved
/// branches come closest, with the gap and branch frequencies there.
///
/// Columns where fewer than two peaks resolve are skipped; if no column
/// resolves two, the scan is declared under-resolved.
pub fn find_avoided_crossing(map: &SpectroscopyMap) -> Result<CrossingReport> {
    if map.probe_grid.len() < 5 {
        return Err(Error::InvalidArgument(
            "probe grid too coarse for peak extraction (need at least 5 points)".into(),
        ));
    }
    // Two samples of separation between peaks, so a single broad line cannot
    // count twice.
    let min_sep = 2.0 * (map.probe_grid[1] - map.probe_grid[0]);
    let mut best: Option<CrossingReport> = None;
    for (phi, column) in map.flux_grid.iter().zip(&map.intensity) {
        let peaks = column_peaks(&map.probe_grid, column, 0.02);
        // Smallest separation between distinct peaks in this column.
        for pair in peaks.windows(2) {
            let gap = pair[1] - pair[0];
            if gap < min_sep {
                continue;
            }
            if best.is_none_or(|b| gap < b.gap) {
                best = Some(CrossingReport {
                    flux_at_min_gap: *phi,
                    gap,
                    branch_low: pair[0],
                    branch_high: pair[1],
                });
            }
        }
    }
    best.ok_or_else(|| {
        Error::UnderResolved("no flux column resolves two spectral branches".into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{effective_j, ModeLabel, Preset};
    use crate::linalg::re;
    use crate::util::linspace;

    fn default_selection() -> SubsystemSelector {
        SubsystemSelector::new(vec![
            (ModeLabel::Interior(1), 3),
            (ModeLabel::Interior(2), 3),
            (ModeLabel::Tunable, 3),
        ])
        .unwrap()
    }

    /// Single-excitation ladder: ground state plus two coupled modes.
    fn two_branch_builder(
        omega_a: f64,
        slope: f64,
        j: f64,
    ) -> impl Fn(f64) -> Result<ComplexMatrix> + Sync {
        move |phi: f64| {
            let omega_b = omega_a + slope * phi;
            ComplexMatrix::from_row_major(
                3,
                3,
                vec![
                    re(0.0),
                    re(0.0),
                    re(0.0),
                    re(0.0),
                    re(omega_a),
                    re(j),
                    re(0.0),
                    re(j),
                    re(omega_b),
                ],
            )
        }
    }

    #[test]
    fn uncoupled_map_shows_straight_branches() {
        let mut params = DeviceParams::preset(Preset::Baseline);
        params.exchange_int_tun = [0.0; 4];
        let sel = default_selection();
        let flux = linspace(0.70, 0.90, 21);
        let probe = linspace(TAU * 5.0e9, TAU * 6.2e9, 241);
        let map = sweep_spectrum(&params, &sel, &flux, &probe, DEFAULT_BROADENING).unwrap();

        // Peaks sit on the two flat interior lines and the tunable curve.
        for (i, &phi) in flux.iter().enumerate() {
            let peaks = column_peaks(&probe, &map.intensity[i], 0.02);
            let expected = [
                params.interior_freqs[1],
                params.interior_freqs[2],
                crate::device::tunable_freq(&params, phi),
            ];
            for want in expected {
                if want < probe[0] || want > *probe.last().unwrap() {
                    continue;
                }
                let nearest =
                    peaks.iter().map(|p| (p - want).abs()).fold(f64::INFINITY, f64::min);
                // Within one probe cell (5 MHz cells over a 1.2 GHz band).
                assert!(
                    nearest < TAU * 6.0e6,
                    "no peak near {:.4} GHz at flux {phi}",
                    want / TAU / 1e9
                );
            }
        }
    }

    #[test]
    fn synthetic_resonant_exchange_gap_is_twice_j() {
        let j = TAU * 10.0e6;
        let omega_a = TAU * 5.5e9;
        // flux in [-1, 1] maps to a +/- 100 MHz detuning sweep.
        let builder = two_branch_builder(omega_a, TAU * 100.0e6, j);
        let flux = linspace(-1.0, 1.0, 81);
        let probe = linspace(TAU * 5.45e9, TAU * 5.55e9, 401);
        let map = map_from_builder(builder, &flux, &probe, TAU * 1.0e6).unwrap();
        let report = find_avoided_crossing(&map).unwrap();
        assert!(
            (report.gap - 2.0 * j).abs() < 0.05 * 2.0 * j,
            "gap {:.4} MHz vs 2J = {:.4} MHz",
            report.gap / TAU / 1e6,
            2.0 * j / TAU / 1e6
        );
        assert!(report.flux_at_min_gap.abs() < 0.05, "crossing should sit at zero detuning");
        assert!(!report.below_broadening_floor(TAU * 1.0e6));
        assert!(report.branch_high > report.branch_low);
    }

    #[test]
    fn gap_grows_monotonically_with_coupling() {
        let omega_a = TAU * 5.5e9;
        let flux = linspace(-1.0, 1.0, 41);
        let probe = linspace(TAU * 5.44e9, TAU * 5.56e9, 481);
        let mut last_gap = 0.0;
        for &j_mhz in &[5.0, 10.0, 15.0, 20.0] {
            let j = TAU * j_mhz * 1e6;
            let map =
                map_from_builder(two_branch_builder(omega_a, TAU * 100.0e6, j), &flux, &probe, TAU * 1.0e6)
                    .unwrap();
            let gap = find_avoided_crossing(&map).unwrap().gap;
            assert!(gap > last_gap, "gap must grow with J: {gap} after {last_gap}");
            last_gap = gap;
        }
    }

    #[test]
    fn crossing_flux_stable_under_probe_refinement() {
        let j = TAU * 10.0e6;
        let builder = two_branch_builder(TAU * 5.5e9, TAU * 100.0e6, j);
        let flux = linspace(-0.5, 0.5, 51);
        let coarse = linspace(TAU * 5.46e9, TAU * 5.54e9, 161);
        let fine = linspace(TAU * 5.46e9, TAU * 5.54e9, 641);
        let map_c = map_from_builder(&builder, &flux, &coarse, TAU * 1.0e6).unwrap();
        let map_f = map_from_builder(&builder, &flux, &fine, TAU * 1.0e6).unwrap();
        let phi_c = find_avoided_crossing(&map_c).unwrap().flux_at_min_gap;
        let phi_f = find_avoided_crossing(&map_f).unwrap().flux_at_min_gap;
        let flux_cell = flux[1] - flux[0];
        assert!(
            (phi_c - phi_f).abs() < flux_cell + 1e-12,
            "crossing moved from {phi_c} to {phi_f} under probe refinement"
        );
    }

    #[test]
    fn device_crossing_lands_near_calibrated_flux() {
        let params = DeviceParams::preset(Preset::Baseline);
        let sel = default_selection();
        let flux = linspace(0.6, 1.1, 101);
        let probe = linspace(TAU * 5.0e9, TAU * 6.2e9, 121);
        let map = sweep_spectrum(&params, &sel, &flux, &probe, DEFAULT_BROADENING).unwrap();
        let report = find_avoided_crossing(&map).unwrap();
        assert!(
            (report.flux_at_min_gap - 0.82).abs() <= 0.02,
            "crossing at {} rather than 0.82 +/- 0.02",
            report.flux_at_min_gap
        );
    }

    #[test]
    fn spectator_mode_leaves_in_band_response_unchanged() {
        // The readout mode couples only to exterior qubits, so selecting it
        // alongside the default trio adds an uncoupled out-of-band spectator.
        let params = DeviceParams::preset(Preset::Baseline);
        let flux = linspace(0.78, 0.86, 9);
        let probe = linspace(TAU * 5.4e9, TAU * 5.7e9, 61);
        let base = sweep_spectrum(&params, &default_selection(), &flux, &probe, DEFAULT_BROADENING)
            .unwrap();
        let sel_spec = SubsystemSelector::new(vec![
            (ModeLabel::Interior(1), 3),
            (ModeLabel::Interior(2), 3),
            (ModeLabel::Tunable, 3),
            (ModeLabel::Readout, 2),
        ])
        .unwrap();
        let with_spec =
            sweep_spectrum(&params, &sel_spec, &flux, &probe, DEFAULT_BROADENING).unwrap();
        for (row_a, row_b) in base.intensity.iter().zip(&with_spec.intensity) {
            for (a, b) in row_a.iter().zip(row_b) {
                assert!(
                    (a - b).abs() < 1e-3,
                    "spectator mode changed the in-band intensity: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn half_gap_matches_mediated_effective_coupling() {
        // Three-mode ladder: qubits a, b exchange through far-detuned
        // mediator c; the measured half-gap must match the perturbative
        // effective coupling.
        let omega_a = TAU * 5.5e9;
        let omega_c = TAU * 6.5e9;
        let g_ac = TAU * 100.0e6;
        let g_bc = TAU * 100.0e6;
        let builder = move |phi: f64| {
            let omega_b = omega_a + TAU * 1.0e9 * phi;
            // Basis: ground, a-excited, b-excited, c-excited.
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
        // Lamb shifts displace both branches by about g^2/Delta, so scan a
        // window wide enough to contain the displaced crossing.
        let flux = linspace(-0.06, 0.06, 121);
        let probe = linspace(TAU * 5.42e9, TAU * 5.54e9, 481);
        let map = map_from_builder(builder, &flux, &probe, TAU * 1.0e6).unwrap();
        let report = find_avoided_crossing(&map).unwrap();
        let j_eff = effective_j(g_ac, g_bc, omega_a - omega_c, omega_a - omega_c).unwrap();
        let half_gap = report.gap / 2.0;
        assert!(
            (half_gap - j_eff.abs()).abs() < 0.10 * j_eff.abs(),
            "half-gap {:.4} MHz vs effective J {:.4} MHz",
            half_gap / TAU / 1e6,
            j_eff.abs() / TAU / 1e6
        );
    }

    #[test]
    fn unresolved_map_reports_under_resolved() {
        // One flat line only: no second branch anywhere.
        let builder =
            |_phi: f64| ComplexMatrix::from_row_major(2, 2, vec![re(0.0), re(0.0), re(0.0), re(TAU * 5.5e9)]);
        let flux = linspace(0.0, 1.0, 5);
        let probe = linspace(TAU * 5.4e9, TAU * 5.6e9, 41);
        let map = map_from_builder(builder, &flux, &probe, TAU * 1.0e6).unwrap();
        let err = find_avoided_crossing(&map).unwrap_err();
        assert!(matches!(err, Error::UnderResolved(_)));
        let msg = err.to_string();
        assert!(msg.contains("broadening"), "advice missing from: {msg}");
    }

    #[test]
    fn map_is_normalized_and_csv_has_full_grid() {
        let builder = two_branch_builder(TAU * 5.5e9, TAU * 100.0e6, TAU * 10.0e6);
        let flux = linspace(-0.2, 0.2, 5);
        let probe = linspace(TAU * 5.45e9, TAU * 5.55e9, 11);
        let map = map_from_builder(builder, &flux, &probe, TAU * 2.0e6).unwrap();
        let max = map
            .intensity
            .iter()
            .flat_map(|r| r.iter().copied())
            .fold(0.0_f64, f64::max);
        assert!((max - 1.0).abs() < 1e-12);
        assert!(map
            .intensity
            .iter()
            .all(|r| r.iter().all(|v| (0.0..=1.0).contains(v))));
        let csv = map.to_csv();
        assert_eq!(csv.lines().count(), 1 + 5 * 11);
    }

    #[test]
    fn grid_validation_rejects_bad_input() {
        let builder = |_phi: f64| Ok(ComplexMatrix::identity(2));
        assert!(map_from_builder(&builder, &[], &[1.0, 2.0], 1.0).is_err());
        assert!(map_from_builder(&builder, &[0.0, 0.0], &[1.0, 2.0], 1.0).is_err());
        assert!(map_from_builder(&builder, &[0.0, 1.0], &[2.0, 1.0], 1.0).is_err());
        assert!(map_from_builder(&builder, &[0.0, 1.0], &[1.0, 2.0], 0.0).is_err());
        assert!(map_from_builder(&builder, &[0.0, 1.0], &[1.0, 2.0], -1.0).is_err());
    }
}
