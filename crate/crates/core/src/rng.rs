//! Seed derivation and counter-based randomness.
//!
//! Every stochastic component takes a `u64` seed and derives child seeds from
//! it with [`derive`], so results never depend on call order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used everywhere a sequential stream is needed.
pub type Rng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the child seed with index `index` from `base`.
#[inline]
pub fn derive(base: u64, index: u64) -> u64 {
    mix64(
        mix64(base.wrapping_add(GOLDEN))
            ^ index
                .wrapping_mul(GOLDEN)
                .wrapping_add(0x632B_E59B_D9B4_E019),
    )
}

/// Derives a child seed along a path of indices.
pub fn derive_path(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(base, |acc, &i| derive(acc, i))
}

/// Uniform `[0, 1)` value that is a pure function of `(key, counter, lane)`.
#[inline]
pub fn unit_f64(key: u64, counter: u64, lane: u64) -> f64 {
    let bits =
        mix64(key ^ mix64(counter.wrapping_mul(GOLDEN) ^ lane.wrapping_mul(0xD6E8_FEB8_6659_FD93)));
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
