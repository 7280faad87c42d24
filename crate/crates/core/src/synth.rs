//! Seeded random instances for verification and benchmarking.
//!
//! The generator is deliberately simple so a counterexample can be rebuilt
//! from `(seed, n, m, density)` by any implementation:
//!
//! * `Lcg` is the 64-bit linear congruential generator
//!   `state = state * 6364136223846793005 + 1442695040888963407 (mod 2^64)`,
//!   advanced once per draw; a draw yields the high 32 bits of the new state.
//! * A unit draw is `u32 / 2^32`.
//! * `below(k)` is `(u32 * k) >> 32`.
//! * Transaction `j` contains label `i + 1` (for `i` in `0..n`, `j` in
//!   `0..m`, row-major) iff a unit draw is `< density`.
//! * Supports are then drawn per dense item as `1 + below(max)`.

use crate::dataset::{MisProfile, TransactionDataset};

const MULTIPLIER: u64 = 6364136223846793005;
const INCREMENT: u64 = 1442695040888963407;

#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT);
        (self.state >> 32) as u32
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.next_u32() as f64 / 4_294_967_296.0
    }

    /// Uniform in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0 && bound <= 1 << 32);
        (self.next_u32() as u64 * bound) >> 32
    }

    /// Uniform in `lo..=hi`.
    pub fn between(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }
}

/// Random transactions over labels `1..=n`. Items that never occur are
/// absent from the result, so its `n()` may be smaller than `n`.
pub fn random_dataset(rng: &mut Lcg, n: usize, m: usize, density: f64) -> TransactionDataset {
    let rows: Vec<Vec<u64>> = (0..m)
        .map(|_| {
            (0..n)
                .filter(|_| rng.unit() < density)
                .map(|i| i as u64 + 1)
                .collect()
        })
        .collect();
    TransactionDataset::from_transactions(rows).expect("m >= 1")
}

/// Supports uniform in `1..=max`.
pub fn random_profile(rng: &mut Lcg, n: usize, max: u64) -> MisProfile {
    MisProfile::new((0..n).map(|_| rng.between(1, max.max(1))).collect()).expect("supports >= 1")
}

/// A dataset and a profile with supports uniform in `[1, m]`.
pub fn random_instance(
    rng: &mut Lcg,
    n: usize,
    m: usize,
    density: f64,
) -> (TransactionDataset, MisProfile) {
    let ds = random_dataset(rng, n, m, density);
    let profile = random_profile(rng, ds.n(), ds.m() as u64);
    (ds, profile)
}
