//! Counter-based random streams.
//!
//! Every random draw in the crate is addressed by a seed plus a path of
//! integer keys (cell index, trial, replicate, ...). The key path is hashed
//! with the SplitMix64 finalizer into a 64-bit stream key, which seeds a
//! ChaCha8 generator. Results therefore depend only on the address of a
//! draw, never on evaluation order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a stream key from a seed and a key path.
pub fn derive(seed: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(mix64(seed.wrapping_add(GOLDEN_GAMMA)), |acc, &k| {
            mix64(acc ^ mix64(k.wrapping_add(GOLDEN_GAMMA).wrapping_mul(GOLDEN_GAMMA)))
        })
}

/// Uniform draw in [0, 1) addressed by (seed, keys), using the top 53 bits.
pub fn uniform(seed: u64, keys: &[u64]) -> f64 {
    (derive(seed, keys) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A ChaCha8 generator owning the stream at (seed, keys).
pub fn stream(seed: u64, keys: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, keys))
}
