//! Seed splitting.
//!
//! Every random stream is derived from the master seed by folding a path of
//! integers through the SplitMix64 finalizer:
//!
//! ```text
//! derive(master, [a, b, c]) = mix(mix(mix(master ^ GOLDEN) ^ a) ^ b) ^ c ...
//! ```
//!
//! The Monte Carlo driver uses the path `[power_index, drop_index, attempt]`
//! so that no two sweep points share a stream, and a drop that has to be
//! redrawn gets a fresh one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(master ^ GOLDEN), |acc, &p| mix(acc ^ p))
}

/// Seed of one Monte Carlo drop.
pub fn drop_seed(master: u64, power_index: usize, drop_index: usize, attempt: usize) -> u64 {
    derive(master, &[power_index as u64, drop_index as u64, attempt as u64])
}

/// Stream labels used inside one drop.
pub(crate) mod stream {
    pub const USERS: u64 = 1;
    pub const PHASE_SAT1: u64 = 2;
    pub const PHASE_SAT2: u64 = 3;
}

pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, &[stream]))
}
