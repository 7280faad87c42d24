//! Propagation cost measurements over synthetic datasets of growing size.
//!
//! The headline number is the cost of one `FreqRare` call at the root, where
//! the propagator intersects `cover(P)` with every one of the `n` item
//! covers of `m` bits. That call should scale with `n * m`.

use std::hint::black_box;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use crate::dataset::{MisProfile, TransactionDataset};
use crate::engine::{search, Model, SearchConfig, SearchState};
use crate::propagators::{FreqRare, PropagationResult, Propagator};
use crate::synth::Lcg;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalePoint {
    pub n: usize,
    pub m: usize,
    /// Nanoseconds per root `FreqRare` call.
    pub root_ns: f64,
    /// Nodes explored by the node-limited Q0 run.
    pub nodes: u64,
    /// Mean nanoseconds of fixpoint propagation per visited node.
    pub per_node_ns: f64,
}

/// `n` items over `m` transactions with every item present at least once,
/// each other cell present with probability `density`.
pub fn synthetic_dataset(n: usize, m: usize, density: f64, seed: u64) -> TransactionDataset {
    assert!(n >= 1 && m >= 1);
    let mut rng = Lcg::new(seed);
    let rows: Vec<Vec<u64>> = (0..m)
        .map(|j| {
            (0..n)
                .filter(|&i| i % m == j || rng.unit() < density)
                .map(|i| i as u64 + 1)
                .collect()
        })
        .collect();
    TransactionDataset::from_transactions(rows).expect("m >= 1")
}

/// Best-of-batches time of one root `FreqRare` call under a unit profile
/// (so nothing is pruned and the state is reusable).
pub fn measure_root_propagation(ds: &TransactionDataset, budget: Duration) -> Duration {
    let profile = MisProfile::uniform(ds.n(), 1).expect("support 1");
    let prop = FreqRare::new(0);
    let mut state = SearchState::new(ds, 1);

    let mut reps = 1u32;
    loop {
        let start = Instant::now();
        for _ in 0..reps {
            let r = prop.propagate(black_box(&mut state), &profile);
            debug_assert_eq!(r, PropagationResult::Stable);
        }
        if start.elapsed() >= budget / 20 || reps >= 1 << 24 {
            break;
        }
        reps *= 2;
    }
    let mut best = Duration::MAX;
    let deadline = Instant::now() + budget;
    for batch in 0.. {
        let start = Instant::now();
        for _ in 0..reps {
            black_box(prop.propagate(black_box(&mut state), &profile));
        }
        best = best.min(start.elapsed() / reps);
        if batch >= 4 && Instant::now() >= deadline {
            break;
        }
    }
    best
}

/// Measures one point: root call cost plus a Q0 search capped at
/// `max_nodes` nodes with propagation timing on.
pub fn measure_point(
    n: usize,
    m: usize,
    seed: u64,
    max_nodes: u64,
    budget: Duration,
) -> ScalePoint {
    let ds = synthetic_dataset(n, m, 0.5, seed);
    let root = measure_root_propagation(&ds, budget);

    let profile = MisProfile::uniform(ds.n(), 1).expect("support 1");
    let mut model = Model::new(&ds, &profile, 1);
    model.post(Box::new(FreqRare::new(0)));
    let stats = search(
        &model,
        SearchConfig {
            max_nodes: Some(max_nodes),
            time_propagation: true,
            ..Default::default()
        },
        |_| ControlFlow::Continue(()),
    );
    let per_node = stats.propagation.as_nanos() as f64 / stats.propagations.max(1) as f64;
    ScalePoint {
        n: ds.n(),
        m: ds.m(),
        root_ns: root.as_nanos() as f64,
        nodes: stats.nodes,
        per_node_ns: per_node,
    }
}

/// Geometric sweep: point `f` uses `n = base_n * f`, `m = base_m * f`.
pub fn sweep(base_n: usize, base_m: usize, factors: &[usize], budget: Duration) -> Vec<ScalePoint> {
    factors
        .iter()
        .map(|&f| measure_point(base_n * f, base_m * f, 42, 2_000, budget))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_dataset_keeps_every_item() {
        let ds = synthetic_dataset(50, 7, 0.1, 1);
        assert_eq!((ds.n(), ds.m()), (50, 7));
        assert!((0..ds.n()).all(|i| ds.item_frequency(i) >= 1));
    }

    #[test]
    fn single_item_point_completes() {
        let p = measure_point(1, 1, 0, 100, Duration::from_millis(5));
        assert_eq!((p.n, p.m), (1, 1));
        assert!(p.root_ns > 0.0);
        assert!(p.nodes >= 1);
    }
}
