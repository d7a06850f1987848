//! Reproducible per-replicate random number streams.
//!
//! Every Monte Carlo loop in this crate keys its randomness on
//! `(seed, replicate)`: replicate `r` always reads stream `r` of a ChaCha
//! cipher seeded with `seed`, regardless of which thread runs it or in what
//! order. This is what makes results bitwise independent of thread count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG stream for one replicate of an experiment.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Derive an independent sub-seed for a named purpose (e.g. the two box
/// sizes of an expectation-gap run, or the coarse/fine parts of a
/// conditional sample).
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    splitmix64(seed.wrapping_add(splitmix64(salt ^ 0x9e37_79b9_7f4a_7c15)))
}

/// SplitMix64 finalizer; a bijection on u64.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
