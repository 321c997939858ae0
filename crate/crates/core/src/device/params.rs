//! Device parameter sets, mode labels, presets, and the tunable-qubit flux
//! map.
//!
//! The chip has fourteen modes: four interior transmons coupled to a central
//! flux-tunable transmon, four exterior transmons coupled to a shared readout
//! resonator, and four coupling resonators (one per interior/exterior pair).
//! All frequencies and couplings are angular (rad/s).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// 2 pi, used when converting cyclic GHz/MHz quantities to rad/s.
pub const TAU: f64 = std::f64::consts::TAU;

/// Mode labels in canonical order: interior transmons, exterior transmons,
/// the tunable transmon, coupling resonators, readout resonator. Indices are
/// zero-based internally and one-based in display names ("int1".."int4").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeLabel {
    Interior(usize),
    Exterior(usize),
    Tunable,
    CouplerRes(usize),
    Readout,
}

impl ModeLabel {
    /// All fourteen modes in canonical order.
    pub fn all() -> Vec<ModeLabel> {
        let mut v = Vec::with_capacity(14);
        v.extend((0..4).map(ModeLabel::Interior));
        v.extend((0..4).map(ModeLabel::Exterior));
        v.push(ModeLabel::Tunable);
        v.extend((0..4).map(ModeLabel::CouplerRes));
        v.push(ModeLabel::Readout);
        v
    }

    /// Canonical ordering index (0..14).
    pub fn canonical_index(&self) -> usize {
        match *self {
            ModeLabel::Interior(k) => k,
            ModeLabel::Exterior(k) => 4 + k,
            ModeLabel::Tunable => 8,
            ModeLabel::CouplerRes(k) => 9 + k,
            ModeLabel::Readout => 13,
        }
    }

    /// True for transmon modes (anharmonic), false for linear resonators.
    pub fn is_transmon(&self) -> bool {
        matches!(self, ModeLabel::Interior(_) | ModeLabel::Exterior(_) | ModeLabel::Tunable)
    }

    fn check_index(self) -> Result<Self> {
        let ok = match self {
            ModeLabel::Interior(k) | ModeLabel::Exterior(k) | ModeLabel::CouplerRes(k) => k < 4,
            _ => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidArgument(format!("mode index out of range in {self}")))
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModeLabel::Interior(k) => write!(f, "int{}", k + 1),
            ModeLabel::Exterior(k) => write!(f, "ext{}", k + 1),
            ModeLabel::Tunable => write!(f, "tun"),
            ModeLabel::CouplerRes(k) => write!(f, "cres{}", k + 1),
            ModeLabel::Readout => write!(f, "ro"),
        }
    }
}

impl FromStr for ModeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_idx = |rest: &str, what: &str| -> Result<usize> {
            rest.parse::<usize>()
                .ok()
                .and_then(|k| k.checked_sub(1))
                .ok_or_else(|| Error::InvalidArgument(format!("bad {what} index in '{s}'")))
        };
        let label = if let Some(rest) = s.strip_prefix("int") {
            ModeLabel::Interior(parse_idx(rest, "interior")?)
        } else if let Some(rest) = s.strip_prefix("ext") {
            ModeLabel::Exterior(parse_idx(rest, "exterior")?)
        } else if let Some(rest) = s.strip_prefix("cres") {
            ModeLabel::CouplerRes(parse_idx(rest, "coupling-resonator")?)
        } else if s == "tun" {
            ModeLabel::Tunable
        } else if s == "ro" {
            ModeLabel::Readout
        } else {
            return Err(Error::InvalidArgument(format!(
                "unknown mode '{s}' (expected int1..int4, ext1..ext4, tun, cres1..cres4, ro)"
            )));
        };
        label.check_index()
    }
}

/// Named parameter presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Pre-optimization electrical design.
    Baseline,
    /// Surrogate-optimized electrical design.
    Optimized,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "baseline" => Ok(Preset::Baseline),
            "optimized" => Ok(Preset::Optimized),
            other => Err(Error::InvalidArgument(format!(
                "unknown preset '{other}' (expected 'baseline' or 'optimized')"
            ))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Baseline => write!(f, "baseline"),
            Preset::Optimized => write!(f, "optimized"),
        }
    }
}

/// Electrical parameter set of the chip. All entries rad/s except the
/// dimensionless flux and asymmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceParams {
    /// Interior transmon frequencies.
    pub interior_freqs: [f64; 4],
    /// Interior transmon anharmonicities.
    pub interior_anharms: [f64; 4],
    /// Exterior transmon frequencies.
    pub exterior_freqs: [f64; 4],
    /// Exterior transmon anharmonicities.
    pub exterior_anharms: [f64; 4],
    /// Coupling-resonator frequencies (one per interior/exterior pair).
    pub coupler_res_freqs: [f64; 4],
    /// Readout resonator frequency.
    pub readout_freq: f64,
    /// Tunable transmon frequency at zero flux (sweet spot).
    pub tunable_max_freq: f64,
    /// Tunable transmon anharmonicity.
    pub tunable_anharm: f64,
    /// SQUID junction asymmetry d in [0, 1]; sets the floor of the flux map.
    pub squid_asymmetry: f64,
    /// Normalized flux bias phi/phi0 applied to the tunable transmon.
    pub flux: f64,
    /// Exchange coupling between each interior transmon and its coupling
    /// resonator.
    pub coupling_int_res: [f64; 4],
    /// Exchange coupling between each exterior transmon and the readout
    /// resonator.
    pub coupling_ext_readout: [f64; 4],
    /// Effective exchange between each interior transmon and the tunable
    /// transmon (resonator-mediated, already reduced).
    pub exchange_int_tun: [f64; 4],
    /// Effective exchange between each interior transmon and its paired
    /// exterior transmon.
    pub exchange_int_ext: [f64; 4],
    /// Readout drive amplitude (rad/s) applied to the readout resonator in
    /// the rotating frame.
    pub drive_amp: f64,
    /// Readout drive frequency (rad/s); the rotating frame rotates at this
    /// frequency.
    pub drive_freq: f64,
    /// Dispersive (cross-Kerr) strengths between each exterior transmon and
    /// its paired interior transmon, used by the spin-register mapping.
    pub chi_ext_int: [f64; 4],
    /// Dispersive strengths between each interior transmon and the tunable
    /// transmon.
    pub chi_int_tun: [f64; 4],
    /// Dispersive strengths imprinted through the shared readout; mapped onto
    /// the exterior ring in the spin register.
    pub chi_ext_ring: [f64; 4],
    /// Bare couplings of the exterior transmons to their mediating
    /// resonators, used by effective-pair reductions.
    pub bare_g_ext: [f64; 4],
    /// Bare couplings of the interior transmons to their mediating
    /// resonators.
    pub bare_g_int: [f64; 4],
    /// Bare coupling of the tunable transmon to the mediating resonators.
    pub bare_g_tun: f64,
}

impl DeviceParams {
    /// Construct one of the named presets.
    pub fn preset(which: Preset) -> Self {
        let ghz = |v: f64| TAU * v * 1e9;
        let mrad = |v: f64| v * 1e6;
        let base = DeviceParams {
            interior_freqs: [ghz(5.52), ghz(5.53), ghz(5.57), ghz(5.58)],
            interior_anharms: [ghz(0.2); 4],
            exterior_freqs: [ghz(5.2), ghz(5.4), ghz(5.6), ghz(5.8)],
            exterior_anharms: [ghz(0.2); 4],
            coupler_res_freqs: [ghz(5.10), ghz(5.30), ghz(5.75), ghz(5.90)],
            readout_freq: ghz(7.0),
            // Calibrated so the flux map passes 2 pi * 5.55 GHz at
            // flux = 0.82 with the default asymmetry d = 0.1.
            tunable_max_freq: ghz(5.55) / flux_factor(0.82, 0.1),
            tunable_anharm: ghz(0.2),
            squid_asymmetry: 0.1,
            flux: 0.6,
            coupling_int_res: [mrad(62.83); 4],
            coupling_ext_readout: [mrad(62.83); 4],
            exchange_int_tun: [mrad(62.83); 4],
            exchange_int_ext: [mrad(62.83); 4],
            drive_amp: ghz(0.001),
            drive_freq: ghz(7.0),
            chi_ext_int: [mrad(62.83); 4],
            chi_int_tun: [mrad(62.83); 4],
            chi_ext_ring: [mrad(125.66); 4],
            bare_g_ext: [mrad(62.83); 4],
            bare_g_int: [mrad(62.83); 4],
            bare_g_tun: mrad(62.83),
        };
        match which {
            Preset::Baseline => base,
            Preset::Optimized => DeviceParams {
                interior_freqs: [ghz(5.56), ghz(5.55), ghz(5.53), ghz(5.55)],
                exterior_freqs: [ghz(5.24), ghz(5.42), ghz(5.43), ghz(5.64)],
                coupler_res_freqs: [ghz(5.38), ghz(5.87), ghz(5.81), ghz(5.22)],
                flux: 0.86,
                chi_ext_int: [mrad(700.0), mrad(421.0), mrad(-346.0), mrad(118.0)],
                chi_int_tun: [mrad(-38.5), mrad(79.0), mrad(20.7), mrad(364.0)],
                chi_ext_ring: [mrad(435.0), mrad(-290.0), mrad(141.0), mrad(225.0)],
                bare_g_ext: [mrad(528.0), mrad(-19.61), mrad(517.0), mrad(422.0)],
                bare_g_int: [mrad(662.0), mrad(340.0), mrad(-4.07), mrad(4.88)],
                bare_g_tun: mrad(92.58),
                ..base
            },
        }
    }

    /// Replace the flux bias, leaving everything else untouched.
    pub fn with_flux(&self, flux: f64) -> Self {
        DeviceParams { flux, ..self.clone() }
    }

    /// Bare frequency of a mode at this parameter set's flux bias.
    pub fn mode_freq(&self, label: ModeLabel) -> f64 {
        match label {
            ModeLabel::Interior(k) => self.interior_freqs[k],
            ModeLabel::Exterior(k) => self.exterior_freqs[k],
            ModeLabel::Tunable => tunable_freq(self, self.flux),
            ModeLabel::CouplerRes(k) => self.coupler_res_freqs[k],
            ModeLabel::Readout => self.readout_freq,
        }
    }

    /// Anharmonicity of a transmon mode; `None` for linear resonators.
    pub fn mode_anharm(&self, label: ModeLabel) -> Option<f64> {
        match label {
            ModeLabel::Interior(k) => Some(self.interior_anharms[k]),
            ModeLabel::Exterior(k) => Some(self.exterior_anharms[k]),
            ModeLabel::Tunable => Some(self.tunable_anharm),
            _ => None,
        }
    }

    /// Validate physical consistency.
    pub fn validate(&self) -> Result<()> {
        let mut freqs: Vec<(String, f64)> = Vec::new();
        for k in 0..4 {
            freqs.push((format!("interior_freqs[{k}]"), self.interior_freqs[k]));
            freqs.push((format!("exterior_freqs[{k}]"), self.exterior_freqs[k]));
            freqs.push((format!("coupler_res_freqs[{k}]"), self.coupler_res_freqs[k]));
        }
        freqs.push(("readout_freq".into(), self.readout_freq));
        freqs.push(("tunable_max_freq".into(), self.tunable_max_freq));
        for (name, f) in &freqs {
            if !f.is_finite() || *f <= 0.0 {
                return Err(Error::UnphysicalParameters(format!(
                    "{name} must be positive and finite, got {f:e}"
                )));
            }
        }
        for (name, a) in [
            ("interior_anharms", &self.interior_anharms[..]),
            ("exterior_anharms", &self.exterior_anharms[..]),
        ] {
            if a.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::UnphysicalParameters(format!(
                    "{name} must be nonnegative and finite"
                )));
            }
        }
        if !self.tunable_anharm.is_finite() || self.tunable_anharm < 0.0 {
            return Err(Error::UnphysicalParameters("tunable_anharm must be nonnegative".into()));
        }
        if !(0.0..=1.0).contains(&self.squid_asymmetry) {
            return Err(Error::UnphysicalParameters(format!(
                "squid_asymmetry must lie in [0, 1], got {}",
                self.squid_asymmetry
            )));
        }
        if !self.flux.is_finite() {
            return Err(Error::UnphysicalParameters("flux must be finite".into()));
        }
        let coupling_like = self
            .coupling_int_res
            .iter()
            .chain(&self.coupling_ext_readout)
            .chain(&self.exchange_int_tun)
            .chain(&self.exchange_int_ext)
            .chain(&self.chi_ext_int)
            .chain(&self.chi_int_tun)
            .chain(&self.chi_ext_ring)
            .chain(&self.bare_g_ext)
            .chain(&self.bare_g_int)
            .chain([&self.bare_g_tun, &self.drive_amp, &self.drive_freq]);
        if coupling_like.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::UnphysicalParameters(
                "couplings, drives, and dispersive strengths must be finite".into(),
            ));
        }
        Ok(())
    }
}

impl Default for DeviceParams {
    fn default() -> Self {
        DeviceParams::preset(Preset::Baseline)
    }
}

/// Decoherence parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Transmon energy relaxation time (seconds).
    pub t1: f64,
    /// Transmon total dephasing time (seconds); must satisfy T2 <= 2 T1.
    pub t2: f64,
    /// Coupling-resonator photon decay rate (1/s). Also acts on the qubits
    /// while a resonator-mediated gate window is active.
    pub kappa_res: f64,
    /// Readout-resonator photon decay rate (rad/s equivalent; 1/s).
    pub kappa_readout: f64,
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t1.is_finite() && self.t1 > 0.0 && self.t2.is_finite() && self.t2 > 0.0) {
            return Err(Error::UnphysicalParameters("T1 and T2 must be positive".into()));
        }
        // Allow a hair of roundoff at the T2 = 2 T1 boundary.
        if self.t2 > 2.0 * self.t1 * (1.0 + 1e-12) {
            return Err(Error::UnphysicalParameters(format!(
                "T2 = {:.3e}s exceeds 2 T1 = {:.3e}s",
                self.t2,
                2.0 * self.t1
            )));
        }
        if self.kappa_res < 0.0 || self.kappa_readout < 0.0 {
            return Err(Error::UnphysicalParameters("decay rates must be nonnegative".into()));
        }
        Ok(())
    }

    /// Pure-dephasing rate `1/T_phi = 1/T2 - 1/(2 T1)`, clamped at zero for
    /// roundoff at the coherence-limited boundary.
    pub fn dephasing_rate(&self) -> Result<f64> {
        self.validate()?;
        Ok((1.0 / self.t2 - 0.5 / self.t1).max(0.0))
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            t1: 80e-6,
            t2: 70e-6,
            kappa_res: 1e5,
            kappa_readout: TAU * 3.35e6,
        }
    }
}

/// Flux map shape factor `(cos^2(pi phi) + d^2 sin^2(pi phi))^(1/4)`.
/// Equals 1 at zero flux and reaches a floor of `sqrt(d)` at half-flux.
pub fn flux_factor(flux: f64, asymmetry: f64) -> f64 {
    let c = (std::f64::consts::PI * flux).cos();
    let s = (std::f64::consts::PI * flux).sin();
    (c * c + asymmetry * asymmetry * s * s).powf(0.25)
}

/// Tunable transmon frequency at a given flux bias:
/// `omega_t(phi) = omega_t_max * (cos^2(pi phi) + d^2 sin^2(pi phi))^(1/4)`.
pub fn tunable_freq(params: &DeviceParams, flux: f64) -> f64 {
    params.tunable_max_freq * flux_factor(flux, params.squid_asymmetry)
}

/// Dispersive-limit exchange between two modes coupled through a common
/// detuned mediator: `J = g1 g2 (1/Delta1 + 1/Delta2) / 2`.
pub fn effective_j(g1: f64, g2: f64, delta1: f64, delta2: f64) -> Result<f64> {
    if delta1 == 0.0 || delta2 == 0.0 {
        return Err(Error::DispersiveViolation(
            "mediator is resonant with a qubit (zero detuning) in the exchange reduction".into(),
        ));
    }
    Ok(0.5 * g1 * g2 * (1.0 / delta1 + 1.0 / delta2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_labels_roundtrip_and_order() {
        let all = ModeLabel::all();
        assert_eq!(all.len(), 14);
        for (i, label) in all.iter().enumerate() {
            assert_eq!(label.canonical_index(), i);
            let parsed: ModeLabel = label.to_string().parse().unwrap();
            assert_eq!(parsed, *label);
        }
        assert!("int5".parse::<ModeLabel>().is_err());
        assert!("xyz".parse::<ModeLabel>().is_err());
        assert!("int0".parse::<ModeLabel>().is_err());
    }

    #[test]
    fn presets_validate_and_differ() {
        let b = DeviceParams::preset(Preset::Baseline);
        let o = DeviceParams::preset(Preset::Optimized);
        b.validate().unwrap();
        o.validate().unwrap();
        assert_ne!(b.flux, o.flux);
        assert_eq!(b.readout_freq, o.readout_freq);
        // Spot values: baseline interior line 2 and optimized exterior line 1.
        assert!((b.interior_freqs[1] - TAU * 5.53e9).abs() < 1.0);
        assert!((o.exterior_freqs[0] - TAU * 5.24e9).abs() < 1.0);
        assert!((o.bare_g_tun - 92.58e6).abs() < 1e-6);
        assert!(o.chi_ext_int[2] < 0.0);
    }

    #[test]
    fn flux_map_reference_points() {
        // Symmetric junction: the published example point
        // omega_max/2pi = 6.04 GHz at phi = 0.82 gives 5.55 GHz.
        let p = DeviceParams {
            tunable_max_freq: TAU * 6.04e9,
            squid_asymmetry: 0.0,
            ..DeviceParams::default()
        };
        let f = tunable_freq(&p, 0.82);
        assert!((f / TAU / 1e9 - 5.55).abs() < 1e-3, "got {} GHz", f / TAU / 1e9);
        // Zero flux is the maximum; half flux reaches the sqrt(d) floor.
        assert!((flux_factor(0.0, 0.1) - 1.0).abs() < 1e-15);
        assert!((flux_factor(0.5, 0.1) - 0.1f64.sqrt()).abs() < 1e-12);
        // Periodicity in integer flux quanta.
        assert!((flux_factor(1.3, 0.1) - flux_factor(-0.7, 0.1)).abs() < 1e-12);
    }

    #[test]
    fn preset_flux_calibration_passes_crossing_band() {
        // Both presets share a flux map that crosses 5.55 GHz at phi = 0.82.
        let p = DeviceParams::preset(Preset::Baseline);
        let f = tunable_freq(&p, 0.82);
        assert!((f - TAU * 5.55e9).abs() < 1.0, "flux map calibration drifted: {f}");
        // Independent closed-form check of the calibrated maximum.
        assert!((p.tunable_max_freq / TAU / 1e9 - 6.033_940_361_649_828).abs() < 1e-6);
    }

    #[test]
    fn effective_j_reference_value() {
        // g1 = g2 = 2pi*80 MHz, both detunings 2pi*1 GHz -> J = 2pi*6.4 MHz.
        let g = TAU * 80e6;
        let d = TAU * 1e9;
        let j = effective_j(g, g, d, d).unwrap();
        assert!((j - TAU * 6.4e6).abs() / (TAU * 6.4e6) < 1e-12);
        assert!(effective_j(g, g, 0.0, d).is_err());
        // Sign follows the detunings.
        assert!(effective_j(g, g, -d, -d).unwrap() < 0.0);
    }

    #[test]
    fn noise_validation_and_dephasing_rate() {
        let n = NoiseParams::default();
        n.validate().unwrap();
        // 1/T_phi = 1/70us - 1/160us = 8035.71.../s.
        let rate = n.dephasing_rate().unwrap();
        assert!((rate - 8035.714_285_714_287).abs() < 1e-6);
        // Coherence-limited boundary: T2 = 2 T1 -> zero pure dephasing.
        let lim = NoiseParams { t1: 50e-6, t2: 100e-6, ..n };
        assert!(lim.dephasing_rate().unwrap().abs() < 1e-9);
        let bad = NoiseParams { t1: 10e-6, t2: 30e-6, ..n };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn params_validation_catches_bad_values() {
        let mut p = DeviceParams::default();
        p.readout_freq = -1.0;
        assert!(p.validate().is_err());
        let mut p = DeviceParams::default();
        p.squid_asymmetry = 1.5;
        assert!(p.validate().is_err());
        let mut p = DeviceParams::default();
        p.bare_g_tun = f64::NAN;
        assert!(p.validate().is_err());
    }
}
