//! Seed derivation.
//!
//! All randomness in the simulator flows from one master seed through
//! [`derive`], so parallel and serial execution orders produce identical
//! results and any sub-computation can be reproduced in isolation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream labels for the independent RNG streams of a run.
pub mod stream {
    pub const DATA: u64 = 0x01;
    pub const SPLIT: u64 = 0x02;
    pub const PARTITION: u64 = 0x03;
    pub const POISON: u64 = 0x04;
    pub const REFERENCE: u64 = 0x05;
    pub const MODEL_INIT: u64 = 0x06;
    pub const AE_INIT: u64 = 0x07;
    pub const AE_TRAIN: u64 = 0x08;
    pub const CALIBRATE: u64 = 0x09;
    pub const CLIENT: u64 = 0x0a;
    pub const EPOCH: u64 = 0x0b;
    pub const PCA: u64 = 0x0c;
    pub const SUBSET: u64 = 0x0d;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `seed` and an ordered list of labels
/// (stream tag, client id, round, ...). Stable across platforms.
pub fn derive(seed: u64, labels: &[u64]) -> u64 {
    let mut h = splitmix64(seed);
    for &l in labels {
        h = splitmix64(h ^ l.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    }
    h
}

/// A deterministic RNG seeded from a derived seed.
pub fn rng(seed: u64, labels: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, labels))
}
