//! Seeding conventions.
//!
//! All randomness comes from [`ChaCha8Rng`], a portable 64-bit-seedable
//! generator whose output does not depend on platform or word size. A single
//! path is driven by `ChaCha8Rng::seed_from_u64(seed)`. Replicate `r` of an
//! experiment with base seed `b` uses the seed [`replicate_seed`]`(b, r)`, so
//! any replicate can be re-simulated on its own from the seed recorded next to
//! it.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Generator for a single path.
pub fn path_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of replicate `replicate` under `base_seed`.
///
/// SplitMix64 finalizer applied to the pair; distinct pairs give distinct,
/// well-mixed seeds, and the result depends on nothing else.
pub fn replicate_seed(base_seed: u64, replicate: u64) -> u64 {
    let mut z = base_seed
        .wrapping_add(replicate.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
