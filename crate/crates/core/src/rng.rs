//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 seeded with
//! `seed_from_u64`. Independent sub-streams for sample `k` of a campaign are
//! obtained by mixing `(seed, k)` through SplitMix64, so a single sample can be
//! regenerated from its derived seed alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for a root seed.
pub fn from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th sub-stream of `seed`.
pub fn derive(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x6A09_E667_F3BC_C909)))
}
