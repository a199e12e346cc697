//! Counter-based seed derivation.
//!
//! Every random quantity in the simulator is addressed by a tuple of
//! integers (run seed, stage, channel, forecast step, cell, ...). The tuple
//! is folded through SplitMix64 so any draw can be produced without
//! generating its predecessors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes an ordered tuple of words into one 64-bit seed.
pub fn mix(parts: &[u64]) -> u64 {
    // Length-prefixed so (a) and (a, 0) differ.
    let mut h = splitmix64(parts.len() as u64 ^ 0x5EED_CAFE_F00D_D00D);
    for &p in parts {
        h = splitmix64(h ^ splitmix64(p));
    }
    h
}

/// Uniform draw in `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn rng_from(parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(parts))
}

/// Channel identifiers used in sub-seed tuples.
pub mod channel {
    pub const WIND_SPEED: u64 = 1;
    pub const WIND_DIR: u64 = 2;
    pub const CURRENT_SPEED: u64 = 3;
    pub const CURRENT_DIR: u64 = 4;
    pub const COARSE: u64 = 10;
    pub const FINE: u64 = 11;
    pub const FORECAST: u64 = 20;
    pub const PLANNER: u64 = 30;
}
