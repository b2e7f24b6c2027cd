//! Deterministic randomness.
//!
//! Edge weights and auxiliary clocks use a stateless counter hash keyed on
//! `(seed, domain, coordinates, index)`, so any value can be recomputed in
//! any order. Sequential streams (SIDLA clocks and coins) are ChaCha8
//! generators seeded from the same hash under distinct domains.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Hash domains. Distinct domains give independent draws for the same key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Weight = 0x5745_4947_4854_0001,
    AuxClock = 0x4155_5843_4c4b_0002,
    SidlaClock = 0x5349_444c_434b_0003,
    SidlaCoin = 0x5349_444c_434e_0004,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of `(seed, domain, words...)`.
#[inline]
pub fn counter_hash(seed: u64, domain: Domain, words: &[u64]) -> u64 {
    let mut h = mix64(seed ^ (domain as u64));
    for &w in words {
        h = mix64(h.wrapping_add(GOLDEN) ^ w);
    }
    h
}

/// Uniform in `[0, 1)` from the top 53 bits.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse CDF of Exp(1) at `u ∈ [0, 1)`.
#[inline]
pub fn exp1_from_uniform(u: f64) -> f64 {
    -(-u).ln_1p()
}

pub fn stream(seed: u64, domain: Domain) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(counter_hash(seed, domain, &[]))
}
