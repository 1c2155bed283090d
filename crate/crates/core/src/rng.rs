//! Random streams.
//!
//! Every simulation uses [`SimRng`], which is xoshiro256++ seeded from a
//! single `u64` through SplitMix64 (`SeedableRng::seed_from_u64`). Bounded
//! integers are drawn with `Rng::random_range`, which rejects out-of-zone
//! samples and therefore has no modulo bias.

use rand::SeedableRng;

pub type SimRng = rand_xoshiro::Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// SplitMix64 output function; a bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replica `index` under `master_seed`:
/// `mix64(master_seed + GOLDEN_GAMMA * (index + 1))` with wrapping arithmetic.
///
/// Distinct indices below 2^64 - 1 always get distinct seeds, since the
/// affine map is injective modulo 2^64 (the multiplier is odd) and `mix64`
/// is a bijection.
pub fn replica_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}
