//! Seed derivation for reproducible parallel trials.
//!
//! Every trial owns a ChaCha8 stream keyed by a hash of
//! `(master seed, trial index, start vertex)`, so the multiset of results
//! is a pure function of the master seed no matter how trials are
//! scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Order-sensitive fold of `parts` into `master`; equal components in
/// different positions produce different seeds.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut h = mix64(master);
    for &p in parts {
        h = mix64(h ^ mix64(p));
    }
    h
}

/// Independent stream for one trial.
pub fn trial_stream(master: u64, trial_index: u64, start_vertex: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, &[trial_index, start_vertex]))
}

/// Stream for auxiliary draws (start-vertex sampling, pair sampling),
/// namespaced by a tag so it never collides with trial streams.
pub fn tagged_stream(master: u64, tag: &str) -> ChaCha8Rng {
    let mut h = mix64(master);
    for b in tag.bytes() {
        h = mix64(h ^ b as u64);
    }
    ChaCha8Rng::seed_from_u64(h)
}
