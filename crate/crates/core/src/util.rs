//! Small shared utilities: deterministic seed derivation, grids, hashing.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 mixing step. Used to derive statistically independent child
/// seeds from a (seed, index) pair so that parallel work items get their own
/// reproducible RNG streams regardless of scheduling order.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a base seed and a work-item index.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    // Two mixing rounds decorrelate (base, index) pairs that differ in a
    // single low bit.
    splitmix64(splitmix64(base ^ 0x51A5_C0DE_D00D_F00Du64.wrapping_add(index)).wrapping_add(index))
}

/// Seeded RNG for a given work item. All stochastic code in the crate draws
/// from ChaCha8 streams created through this helper.
pub fn rng_for(base: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, index))
}

/// `n` evenly spaced points covering [a, b] inclusive. `n == 1` yields `[a]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            (0..n).map(|i| a + step * i as f64).collect()
        }
    }
}

/// FNV-1a 64-bit hash; used as a cheap integrity check on persisted weights.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

/// Trailing moving average with the given window; the output has the same
/// length as the input, with shorter windows at the start. Used for trend
/// tests on noisy curves.
pub fn moving_average(xs: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    xs.iter()
        .enumerate()
        .map(|(i, _)| {
            let start = (i + 1).saturating_sub(window);
            let slice = &xs[start..=i];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}
