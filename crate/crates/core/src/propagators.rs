//! Propagators over Boolean item variables.
//!
//! [`FreqRare`] enforces the multiple-minimum-support frequency condition.
//! The others encode user constraints: [`DistanceMis`] bounds the support
//! spread inside an itemset, [`MinCardinality`] its size, and [`Disjoint`] /
//! [`LexLess`] relate two blocks of a k-pattern query.

use std::fmt;

use crate::dataset::MisProfile;
use crate::engine::{Domain, SearchState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PropagationResult {
    Failure,
    /// At least one domain was narrowed.
    Changed,
    Stable,
}

impl PropagationResult {
    fn from_changed(changed: bool) -> Self {
        if changed {
            PropagationResult::Changed
        } else {
            PropagationResult::Stable
        }
    }
}

/// A filtering algorithm run by the fixpoint loop.
///
/// Implementations mutate domains only through [`SearchState::fix`] so every
/// change is trailed. Each call must leave the propagator at its own
/// fixpoint: an immediate second call returns `Stable` or `Failure`.
pub trait Propagator: fmt::Debug + Send + Sync {
    fn propagate(&self, state: &mut SearchState<'_>, profile: &MisProfile) -> PropagationResult;

    /// Blocks this propagator reads or writes.
    fn scope(&self) -> &[usize];

    fn name(&self) -> &'static str;
}

/// Frequency under multiple minimum item supports.
///
/// With `s = min_{i in P ∪ U} s_i`, fails when `|cover(P)| < s` and removes
/// value 1 from every unfixed item `i` with `|cover(P) ∩ cover(i)| < s`.
/// Pruning can raise `s`, so the check repeats until nothing changes.
#[derive(Clone, Debug)]
pub struct FreqRare {
    block: [usize; 1],
    threshold_offset: u64,
}

impl FreqRare {
    pub fn new(block: usize) -> Self {
        FreqRare {
            block: [block],
            threshold_offset: 0,
        }
    }

    /// Adds a constant to the computed threshold. Used to check that the
    /// verification harness detects a wrong propagator.
    #[doc(hidden)]
    pub fn with_threshold_offset(mut self, offset: u64) -> Self {
        self.threshold_offset = offset;
        self
    }
}

impl Propagator for FreqRare {
    fn propagate(&self, state: &mut SearchState<'_>, profile: &MisProfile) -> PropagationResult {
        let block = self.block[0];
        let ds = state.dataset();
        let n = state.n();
        let mut changed = false;
        let mut pruned = Vec::new();
        loop {
            let threshold = (0..n)
                .filter(|&i| state.domain(block, i) != Domain::Zero)
                .map(|i| profile.get(i))
                .min();
            let Some(threshold) = threshold else {
                // P and U both empty: nothing left to constrain
                break;
            };
            let threshold = (threshold + self.threshold_offset) as usize;
            let cover = state.cover(block);
            if cover.count() < threshold {
                return PropagationResult::Failure;
            }
            pruned.clear();
            pruned.extend(
                state
                    .unfixed_items(block)
                    .filter(|&i| cover.intersection_count(ds.item_cover(i)) < threshold),
            );
            if pruned.is_empty() {
                break;
            }
            for &i in &pruned {
                state.fix(block, i, false);
            }
            changed = true;
        }
        PropagationResult::from_changed(changed)
    }

    fn scope(&self) -> &[usize] {
        &self.block
    }

    fn name(&self) -> &'static str {
        "FreqRare"
    }
}

/// Every pair of items in the itemset has `|s_i - s_j| <= ub`.
///
/// Equivalent to the pairwise constraints: with `lo`/`hi` the smallest and
/// largest support in `P`, fails when `hi - lo > ub` and removes value 1 from
/// unfixed items whose support falls outside `[hi - ub, lo + ub]`.
#[derive(Clone, Debug)]
pub struct DistanceMis {
    block: [usize; 1],
    ub: u64,
}

impl DistanceMis {
    pub fn new(block: usize, ub: u64) -> Self {
        DistanceMis { block: [block], ub }
    }
}

impl Propagator for DistanceMis {
    fn propagate(&self, state: &mut SearchState<'_>, profile: &MisProfile) -> PropagationResult {
        let block = self.block[0];
        if state.ones(block) == 0 {
            return PropagationResult::Stable;
        }
        let (mut lo, mut hi) = (u64::MAX, 0);
        for i in 0..state.n() {
            if state.domain(block, i) == Domain::One {
                lo = lo.min(profile.get(i));
                hi = hi.max(profile.get(i));
            }
        }
        if hi - lo > self.ub {
            return PropagationResult::Failure;
        }
        let allowed_lo = hi.saturating_sub(self.ub);
        let allowed_hi = lo.saturating_add(self.ub);
        let mut changed = false;
        for i in 0..state.n() {
            if state.is_unfixed(block, i) {
                let s = profile.get(i);
                if s < allowed_lo || s > allowed_hi {
                    state.fix(block, i, false);
                    changed = true;
                }
            }
        }
        PropagationResult::from_changed(changed)
    }

    fn scope(&self) -> &[usize] {
        &self.block
    }

    fn name(&self) -> &'static str {
        "DistanceMis"
    }
}

/// `sum_i x_i >= c` over one block.
#[derive(Clone, Debug)]
pub struct MinCardinality {
    block: [usize; 1],
    min: usize,
}

impl MinCardinality {
    pub fn new(block: usize, min: usize) -> Self {
        MinCardinality {
            block: [block],
            min,
        }
    }
}

impl Propagator for MinCardinality {
    fn propagate(&self, state: &mut SearchState<'_>, _profile: &MisProfile) -> PropagationResult {
        let block = self.block[0];
        let available = state.ones(block) + state.unfixed_count(block);
        if available < self.min {
            return PropagationResult::Failure;
        }
        if available == self.min && state.unfixed_count(block) > 0 {
            for i in 0..state.n() {
                if state.is_unfixed(block, i) {
                    state.fix(block, i, true);
                }
            }
            return PropagationResult::Changed;
        }
        PropagationResult::Stable
    }

    fn scope(&self) -> &[usize] {
        &self.block
    }

    fn name(&self) -> &'static str {
        "MinCardinality"
    }
}

/// The itemsets of two blocks share no item.
#[derive(Clone, Debug)]
pub struct Disjoint {
    blocks: [usize; 2],
}

impl Disjoint {
    pub fn new(p: usize, q: usize) -> Self {
        assert_ne!(p, q, "disjointness needs two distinct blocks");
        Disjoint { blocks: [p, q] }
    }
}

impl Propagator for Disjoint {
    fn propagate(&self, state: &mut SearchState<'_>, _profile: &MisProfile) -> PropagationResult {
        let [p, q] = self.blocks;
        let mut changed = false;
        for i in 0..state.n() {
            match (state.domain(p, i), state.domain(q, i)) {
                (Domain::One, Domain::One) => return PropagationResult::Failure,
                (Domain::One, Domain::Unfixed) => {
                    state.fix(q, i, false);
                    changed = true;
                }
                (Domain::Unfixed, Domain::One) => {
                    state.fix(p, i, false);
                    changed = true;
                }
                _ => {}
            }
        }
        PropagationResult::from_changed(changed)
    }

    fn scope(&self) -> &[usize] {
        &self.blocks
    }

    fn name(&self) -> &'static str {
        "Disjoint"
    }
}

/// Block `p`'s Boolean vector is lexicographically below block `q`'s
/// (or equal, when not strict). Positions follow ascending item label.
///
/// Walks the common fixed prefix: a fixed `1` facing an unfixed position
/// forces it to `1`, an unfixed position facing a fixed `0` is forced to `0`;
/// the walk stops at the first position where the order is decided or both
/// sides are still open.
#[derive(Clone, Debug)]
pub struct LexLess {
    blocks: [usize; 2],
    strict: bool,
}

impl LexLess {
    pub fn new(p: usize, q: usize, strict: bool) -> Self {
        assert_ne!(p, q, "lex ordering needs two distinct blocks");
        LexLess {
            blocks: [p, q],
            strict,
        }
    }
}

impl Propagator for LexLess {
    fn propagate(&self, state: &mut SearchState<'_>, _profile: &MisProfile) -> PropagationResult {
        let [p, q] = self.blocks;
        let ds = state.dataset();
        let mut changed = false;
        for &i in ds.label_order() {
            match (state.domain(p, i), state.domain(q, i)) {
                (Domain::Zero, Domain::Zero) | (Domain::One, Domain::One) => continue,
                (Domain::Zero, Domain::One) => return PropagationResult::from_changed(changed),
                (Domain::One, Domain::Zero) => return PropagationResult::Failure,
                (Domain::One, Domain::Unfixed) => {
                    state.fix(q, i, true);
                    changed = true;
                }
                (Domain::Unfixed, Domain::Zero) => {
                    state.fix(p, i, false);
                    changed = true;
                }
                _ => return PropagationResult::from_changed(changed),
            }
        }
        if self.strict {
            PropagationResult::Failure
        } else {
            PropagationResult::from_changed(changed)
        }
    }

    fn scope(&self) -> &[usize] {
        &self.blocks
    }

    fn name(&self) -> &'static str {
        "LexLess"
    }
}
