//! Deterministic seed derivation.
//!
//! Every random stream in the crate is keyed by `(base_seed, index)` through
//! a SplitMix64-style mixer, so the value drawn for sample `s` or noise mode
//! `k` never depends on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `index` under `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base) ^ index.wrapping_mul(GOLDEN_GAMMA).rotate_left(17))
}

/// Seed of noise mode `k` (0-based) within a cylindrical sample.
pub fn mode_seed(base: u64, k: usize) -> u64 {
    derive_seed(base, k as u64)
}

/// Seed of Monte Carlo sample `s` within a study.
pub fn sample_seed(base: u64, s: usize) -> u64 {
    // distinct domain from mode seeds
    derive_seed(base ^ 0x5A5A_5A5A_A5A5_A5A5, s as u64)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
