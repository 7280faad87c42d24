//! Fixtures shared by the criterion benchmarks.

use misminer::scaling::synthetic_dataset;
use misminer::{assign_mis, MisMin, MisProfile, Rounding, TransactionDataset};
use num_rational::Ratio;

/// A dense synthetic instance with supports `max(beta * freq, 1)`.
pub fn instance(
    n: usize,
    m: usize,
    density: f64,
    beta: Ratio<u64>,
) -> (TransactionDataset, MisProfile) {
    let ds = synthetic_dataset(n, m, density, 0x5eed);
    let profile = assign_mis(&ds, beta, MisMin::Absolute(1), Rounding::Ceil).expect("valid beta");
    (ds, profile)
}

/// `(n, m)` pairs with `n * m` growing by 4x per step.
pub const SIZES: [(usize, usize); 3] = [(16, 256), (32, 512), (64, 1024)];
