//! Flat key/value config parsing for device and noise parameters.
//!
//! Grammar (one assignment per line):
//!
//! ```text
//! # comment
//! preset = optimized
//! interior_freqs = 5.56, 5.55, 5.53, 5.55 GHz
//! bare_g_tun = 92.58 Mrad/s
//! t1 = 80 us
//! flux = 0.86
//! ```
//!
//! A trailing unit token applies to every number on the line. GHz/MHz/kHz/Hz
//! are *cyclic* frequencies and are converted to angular rad/s with a factor
//! of 2 pi; `Mrad/s`, `krad/s`, and `rad/s` are angular and taken as-is;
//! `s`, `ms`, `us`, `ns` are times. Dimensionless keys (flux, asymmetry)
//! take bare numbers. Unknown keys and malformed values are hard errors.
//! `preset` must come first if present, since later lines override it.

use std::str::FromStr;

use crate::device::params::{DeviceParams, NoiseParams, Preset};
use crate::error::{Error, Result};

/// Parsed configuration: a parameter set plus the noise model.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub preset: Preset,
    pub device: DeviceParams,
    pub noise: NoiseParams,
}

impl Default for ParsedConfig {
    fn default() -> Self {
        ParsedConfig {
            preset: Preset::Baseline,
            device: DeviceParams::preset(Preset::Baseline),
            noise: NoiseParams::default(),
        }
    }
}

/// Multiplier for a unit token, or an error for unknown units.
fn unit_scale(unit: &str) -> Result<f64> {
    let tau = std::f64::consts::TAU;
    Ok(match unit {
        "GHz" => tau * 1e9,
        "MHz" => tau * 1e6,
        "kHz" => tau * 1e3,
        "Hz" => tau,
        "Grad/s" => 1e9,
        "Mrad/s" => 1e6,
        "krad/s" => 1e3,
        "rad/s" => 1.0,
        "s" => 1.0,
        "ms" => 1e-3,
        "us" => 1e-6,
        "ns" => 1e-9,
        other => {
            return Err(Error::Config(format!(
                "unknown unit '{other}' (expected GHz/MHz/kHz/Hz, Grad|Mrad|krad|rad/s, or s/ms/us/ns)"
            )))
        }
    })
}

/// Split a value string into numbers and an optional trailing unit, applying
/// the unit scale to every number.
fn parse_numbers(value: &str) -> Result<Vec<f64>> {
    let trimmed = value.trim();
    if trimmed.is_empty() {
        return Err(Error::Config("empty value".into()));
    }
    // The unit, if any, is the last whitespace-separated token and contains a
    // letter other than scientific-notation digits.
    let (nums_part, scale) = match trimmed.rsplit_once(char::is_whitespace) {
        Some((head, tail)) if tail.parse::<f64>().is_err() => (head, unit_scale(tail)?),
        _ => (trimmed, 1.0),
    };
    nums_part
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map(|v| v * scale)
                .map_err(|_| Error::Config(format!("cannot parse number '{tok}'")))
        })
        .collect()
}

fn expect_scalar(key: &str, vals: &[f64]) -> Result<f64> {
    if vals.len() != 1 {
        return Err(Error::Config(format!("key '{key}' takes one value, got {}", vals.len())));
    }
    Ok(vals[0])
}

fn expect_quad(key: &str, vals: &[f64]) -> Result<[f64; 4]> {
    if vals.len() != 4 {
        return Err(Error::Config(format!(
            "key '{key}' takes four comma-separated values, got {}",
            vals.len()
        )));
    }
    Ok([vals[0], vals[1], vals[2], vals[3]])
}

/// Apply one assignment to the configuration. Returns an error for unknown
/// keys so typos fail loudly instead of being ignored.
pub fn apply_assignment(cfg: &mut ParsedConfig, key: &str, value: &str) -> Result<()> {
    if key == "preset" {
        let preset = Preset::from_str(value.trim())?;
        cfg.preset = preset;
        cfg.device = DeviceParams::preset(preset);
        return Ok(());
    }
    let vals = parse_numbers(value)?;
    let d = &mut cfg.device;
    let n = &mut cfg.noise;
    match key {
        "interior_freqs" => d.interior_freqs = expect_quad(key, &vals)?,
        "interior_anharms" => d.interior_anharms = expect_quad(key, &vals)?,
        "exterior_freqs" => d.exterior_freqs = expect_quad(key, &vals)?,
        "exterior_anharms" => d.exterior_anharms = expect_quad(key, &vals)?,
        "coupler_res_freqs" => d.coupler_res_freqs = expect_quad(key, &vals)?,
        "readout_freq" => d.readout_freq = expect_scalar(key, &vals)?,
        "tunable_max_freq" => d.tunable_max_freq = expect_scalar(key, &vals)?,
        "tunable_anharm" => d.tunable_anharm = expect_scalar(key, &vals)?,
        "squid_asymmetry" => d.squid_asymmetry = expect_scalar(key, &vals)?,
        "flux" => d.flux = expect_scalar(key, &vals)?,
        "coupling_int_res" => d.coupling_int_res = expect_quad(key, &vals)?,
        "coupling_ext_readout" => d.coupling_ext_readout = expect_quad(key, &vals)?,
        "exchange_int_tun" => d.exchange_int_tun = expect_quad(key, &vals)?,
        "exchange_int_ext" => d.exchange_int_ext = expect_quad(key, &vals)?,
        "drive_amp" => d.drive_amp = expect_scalar(key, &vals)?,
        "drive_freq" => d.drive_freq = expect_scalar(key, &vals)?,
        "chi_ext_int" => d.chi_ext_int = expect_quad(key, &vals)?,
        "chi_int_tun" => d.chi_int_tun = expect_quad(key, &vals)?,
        "chi_ext_ring" => d.chi_ext_ring = expect_quad(key, &vals)?,
        "bare_g_ext" => d.bare_g_ext = expect_quad(key, &vals)?,
        "bare_g_int" => d.bare_g_int = expect_quad(key, &vals)?,
        "bare_g_tun" => d.bare_g_tun = expect_scalar(key, &vals)?,
        "t1" => n.t1 = expect_scalar(key, &vals)?,
        "t2" => n.t2 = expect_scalar(key, &vals)?,
        "kappa_res" => n.kappa_res = expect_scalar(key, &vals)?,
        "kappa_readout" => n.kappa_readout = expect_scalar(key, &vals)?,
        other => {
            return Err(Error::Config(format!("unknown config key '{other}'")));
        }
    }
    Ok(())
}

/// Parse a whole config document on top of the defaults.
pub fn parse_config_str(text: &str) -> Result<ParsedConfig> {
    let mut cfg = ParsedConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected 'key = value', got '{line}'", lineno + 1))
        })?;
        apply_assignment(&mut cfg, key.trim(), value.trim())
            .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
    }
    cfg.device.validate()?;
    cfg.noise.validate()?;
    Ok(cfg)
}

/// Deterministic plain-text dump of the resolved configuration, suitable for
/// run metadata. Frequencies are printed back in the units they are stored
/// in (rad/s) to avoid any round-trip ambiguity.
pub fn dump_config(cfg: &ParsedConfig) -> String {
    let quad = |v: &[f64; 4]| format!("{}, {}, {}, {}", v[0], v[1], v[2], v[3]);
    let d = &cfg.device;
    let n = &cfg.noise;
    let mut s = String::new();
    s.push_str(&format!("preset = {}\n", cfg.preset));
    s.push_str(&format!("interior_freqs = {} rad/s\n", quad(&d.interior_freqs)));
    s.push_str(&format!("interior_anharms = {} rad/s\n", quad(&d.interior_anharms)));
    s.push_str(&format!("exterior_freqs = {} rad/s\n", quad(&d.exterior_freqs)));
    s.push_str(&format!("exterior_anharms = {} rad/s\n", quad(&d.exterior_anharms)));
    s.push_str(&format!("coupler_res_freqs = {} rad/s\n", quad(&d.coupler_res_freqs)));
    s.push_str(&format!("readout_freq = {} rad/s\n", d.readout_freq));
    s.push_str(&format!("tunable_max_freq = {} rad/s\n", d.tunable_max_freq));
    s.push_str(&format!("tunable_anharm = {} rad/s\n", d.tunable_anharm));
    s.push_str(&format!("squid_asymmetry = {}\n", d.squid_asymmetry));
    s.push_str(&format!("flux = {}\n", d.flux));
    s.push_str(&format!("coupling_int_res = {} rad/s\n", quad(&d.coupling_int_res)));
    s.push_str(&format!("coupling_ext_readout = {} rad/s\n", quad(&d.coupling_ext_readout)));
    s.push_str(&format!("exchange_int_tun = {} rad/s\n", quad(&d.exchange_int_tun)));
    s.push_str(&format!("exchange_int_ext = {} rad/s\n", quad(&d.exchange_int_ext)));
    s.push_str(&format!("drive_amp = {} rad/s\n", d.drive_amp));
    s.push_str(&format!("drive_freq = {} rad/s\n", d.drive_freq));
    s.push_str(&format!("chi_ext_int = {} rad/s\n", quad(&d.chi_ext_int)));
    s.push_str(&format!("chi_int_tun = {} rad/s\n", quad(&d.chi_int_tun)));
    s.push_str(&format!("chi_ext_ring = {} rad/s\n", quad(&d.chi_ext_ring)));
    s.push_str(&format!("bare_g_ext = {} rad/s\n", quad(&d.bare_g_ext)));
    s.push_str(&format!("bare_g_int = {} rad/s\n", quad(&d.bare_g_int)));
    s.push_str(&format!("bare_g_tun = {} rad/s\n", d.bare_g_tun));
    s.push_str(&format!("t1 = {} s\n", n.t1));
    s.push_str(&format!("t2 = {} s\n", n.t2));
    s.push_str(&format!("kappa_res = {} rad/s\n", n.kappa_res));
    s.push_str(&format!("kappa_readout = {} rad/s\n", n.kappa_readout));
    s
}
