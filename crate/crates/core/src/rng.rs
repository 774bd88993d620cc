//! Seeded randomness.
//!
//! Every random draw in the crate comes from [`ChaCha8Rng`] (a portable, counter-based
//! stream cipher generator with a 64-bit seed expansion) and normal variates use the
//! ziggurat sampler behind [`rand_distr::StandardNormal`]. Both are platform
//! independent, so a seed reproduces the same numbers everywhere.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a base seed and a path of indices. Distinct paths give
/// (with overwhelming probability) unrelated streams.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(base), |acc, &p| mix(acc ^ mix(p)))
}
