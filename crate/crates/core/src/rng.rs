//! Seeded generators and seed derivation.
//!
//! Every random draw in the crate goes through [`seeded`], a ChaCha8 stream
//! keyed by a `u64`, so results are reproducible across platforms. Per-item
//! seeds for concurrent work come from [`derive_seed`]:
//! `splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15))`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}
