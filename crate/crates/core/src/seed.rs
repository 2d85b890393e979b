//! Deterministic seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a master
//! seed mixed with a path of stream indices, so the stream used by a given
//! chain, repeat or iteration does not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a master seed with a sequence of stream indices.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream tags, so derived seeds for different purposes never collide.
pub mod stream {
    pub const PROFILE: u64 = 1;
    pub const REPEAT: u64 = 2;
    pub const INIT: u64 = 3;
    pub const WARM_START: u64 = 4;
    pub const NATIVE: u64 = 5;
    pub const SCALED: u64 = 6;
    pub const CD: u64 = 7;
    pub const CALIBRATION: u64 = 8;
    pub const CHAIN: u64 = 9;
    pub const NOISE: u64 = 10;
}
