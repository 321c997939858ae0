//! Normalized design-parameter vectors.
//!
//! The surrogate works on a fixed 34-dimensional slice of [`DeviceParams`]:
//! the tunable electrical quantities (transmon and resonator frequencies,
//! dispersive strengths, bare couplings, flux bias). Anharmonicities, the
//! readout chain, and noise are frozen at their base values. Each dimension
//! is normalized to [0, 1] inside a per-dimension (lo, hi) feasibility box
//! centered on a base parameter set.

use crate::device::DeviceParams;
use crate::error::{Error, Result};

/// Number of optimized dimensions.
pub const THETA_DIM: usize = 34;

/// Coupling-dimension widening factor of the wide feasibility box.
pub const WIDE_BOX_FACTOR: f64 = 12.0;

/// Fractional half-width used for frequency dimensions in the wide box.
pub const WIDE_BOX_FREQ_FRACTION: f64 = 0.2;

/// Slack tolerated on the [0, 1] bounds when validating normalized vectors.
const BOX_SLACK: f64 = 1e-9;

/// Column names of the normalized vector, in dimension order.
pub fn theta_names() -> [&'static str; THETA_DIM] {
    [
        "int_freq1",
        "int_freq2",
        "int_freq3",
        "int_freq4",
        "ext_freq1",
        "ext_freq2",
        "ext_freq3",
        "ext_freq4",
        "cres_freq1",
        "cres_freq2",
        "cres_freq3",
        "cres_freq4",
        "chi_ext_int1",
        "chi_ext_int2",
        "chi_ext_int3",
        "chi_ext_int4",
        "chi_int_tun1",
        "chi_int_tun2",
        "chi_int_tun3",
        "chi_int_tun4",
        "chi_ext_ring1",
        "chi_ext_ring2",
        "chi_ext_ring3",
        "chi_ext_ring4",
        "g_ext1",
        "g_ext2",
        "g_ext3",
        "g_ext4",
        "g_int1",
        "g_int2",
        "g_int3",
        "g_int4",
        "g_tun",
        "flux",
    ]
}

/// Index of the flux dimension (the only dimensionless one).
pub const FLUX_DIM: usize = 33;

/// A per-dimension feasibility box with its frozen base parameter set.
#[derive(Debug, Clone)]
pub struct ThetaSpace {
    base: DeviceParams,
    lo: [f64; THETA_DIM],
    hi: [f64; THETA_DIM],
    descriptor: String,
}

impl ThetaSpace {
    /// Symmetric fractional box: each dimension spans
    /// `value +/- fraction * |value|` around the base parameter set.
    pub fn around(base: &DeviceParams, fraction: f64) -> Result<Self> {
        base.validate()?;
        if !fraction.is_finite() || fraction <= 0.0 {
            return Err(Error::DegenerateDataset(format!(
                "box fraction must be positive, got {fraction}; a zero-width box makes every \
                 sample identical"
            )));
        }
        let center = collect(base);
        let mut lo = [0.0; THETA_DIM];
        let mut hi = [0.0; THETA_DIM];
        for (d, &c) in center.iter().enumerate() {
            let half = fraction * c.abs();
            if half == 0.0 {
                return Err(Error::DegenerateDataset(format!(
                    "dimension {} ({}) has zero width: base value is zero",
                    d,
                    theta_names()[d]
                )));
            }
            lo[d] = c - half;
            hi[d] = c + half;
        }
        Ok(ThetaSpace {
            base: base.clone(),
            lo,
            hi,
            descriptor: format!("fractional:{fraction}"),
        })
    }

    /// Wide exploratory box: couplings and dispersive strengths span
    /// `value +/- 12 |value|` (signs free), frequencies keep the default
    /// fractional width, and the flux bias spans a full half period [0, 1].
    /// Off by default everywhere; the fractional box is the standard one.
    pub fn around_wide(base: &DeviceParams) -> Result<Self> {
        let mut space = ThetaSpace::around(base, WIDE_BOX_FREQ_FRACTION)?;
        let center = collect(base);
        for (d, &c) in center.iter().enumerate().take(FLUX_DIM).skip(12) {
            let half = WIDE_BOX_FACTOR * c.abs();
            space.lo[d] = c - half;
            space.hi[d] = c + half;
        }
        space.lo[FLUX_DIM] = 0.0;
        space.hi[FLUX_DIM] = 1.0;
        space.descriptor = format!("wide:{WIDE_BOX_FACTOR}");
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        THETA_DIM
    }

    /// The frozen template whose non-optimized fields every decode inherits.
    pub fn base(&self) -> &DeviceParams {
        &self.base
    }

    /// `(lo, hi)` bounds of one dimension in physical units.
    pub fn bounds(&self, dim: usize) -> Result<(f64, f64)> {
        if dim >= THETA_DIM {
            return Err(Error::InvalidArgument(format!(
                "dimension {dim} out of range 0..{THETA_DIM}"
            )));
        }
        Ok((self.lo[dim], self.hi[dim]))
    }

    /// Short text form of the box construction, recorded in provenance.
    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Normalized coordinates of the base parameter set.
    pub fn center(&self) -> Vec<f64> {
        self.encode(&self.base).expect("base parameters lie inside their own box")
    }

    /// True when every coordinate lies in [0, 1] (up to roundoff slack).
    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == THETA_DIM
            && theta.iter().all(|&t| (-BOX_SLACK..=1.0 + BOX_SLACK).contains(&t))
    }

    /// Normalize a parameter set into box coordinates.
    pub fn encode(&self, params: &DeviceParams) -> Result<Vec<f64>> {
        let values = collect(params);
        let mut theta = Vec::with_capacity(THETA_DIM);
        for (d, &v) in values.iter().enumerate() {
            let t = (v - self.lo[d]) / (self.hi[d] - self.lo[d]);
            if !(-BOX_SLACK..=1.0 + BOX_SLACK).contains(&t) {
                return Err(Error::InvalidArgument(format!(
                    "{} = {v:e} lies outside the box [{:e}, {:e}]",
                    theta_names()[d],
                    self.lo[d],
                    self.hi[d]
                )));
            }
            theta.push(t.clamp(0.0, 1.0));
        }
        Ok(theta)
    }

    /// Map normalized coordinates back to a validated parameter set.
    pub fn decode(&self, theta: &[f64]) -> Result<DeviceParams> {
        if theta.len() != THETA_DIM {
            return Err(Error::DimensionMismatch(format!(
                "expected {THETA_DIM} coordinates, got {}",
                theta.len()
            )));
        }
        let mut values = [0.0; THETA_DIM];
        for (d, &t) in theta.iter().enumerate() {
            if !t.is_finite() || !(-BOX_SLACK..=1.0 + BOX_SLACK).contains(&t) {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {} ({}) = {t} lies outside [0, 1]",
                    d,
                    theta_names()[d]
                )));
            }
            let t = t.clamp(0.0, 1.0);
            values[d] = self.lo[d] + t * (self.hi[d] - self.lo[d]);
        }
        let params = scatter(&self.base, &values);
        params.validate()?;
        Ok(params)
    }
}

/// Gather the 34 optimized values out of a parameter set, in dimension order.
fn collect(params: &DeviceParams) -> [f64; THETA_DIM] {
    let mut v = [0.0; THETA_DIM];
    v[0..4].copy_from_slice(&params.interior_freqs);
    v[4..8].copy_from_slice(&params.exterior_freqs);
    v[8..12].copy_from_slice(&params.coupler_res_freqs);
    v[12..16].copy_from_slice(&params.chi_ext_int);
    v[16..20].copy_from_slice(&params.chi_int_tun);
    v[20..24].copy_from_slice(&params.chi_ext_ring);
    v[24..28].copy_from_slice(&params.bare_g_ext);
    v[28..32].copy_from_slice(&params.bare_g_int);
    v[32] = params.bare_g_tun;
    v[FLUX_DIM] = params.flux;
    v
}

/// Scatter 34 physical values into a copy of the template parameter set.
fn scatter(base: &DeviceParams, values: &[f64; THETA_DIM]) -> DeviceParams {
    let take4 = |off: usize| -> [f64; 4] {
        [values[off], values[off + 1], values[off + 2], values[off + 3]]
    };
    DeviceParams {
        interior_freqs: take4(0),
        exterior_freqs: take4(4),
        coupler_res_freqs: take4(8),
        chi_ext_int: take4(12),
        chi_int_tun: take4(16),
        chi_ext_ring: take4(20),
        bare_g_ext: take4(24),
        bare_g_int: take4(28),
        bare_g_tun: values[32],
        flux: values[FLUX_DIM],
        ..base.clone()
    }
}
