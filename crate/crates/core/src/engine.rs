//! Trail-based depth-first search over Boolean item variables.
//!
//! Variables are grouped in `k` blocks of `n` items (one block per searched
//! itemset). Block `b`, item `i` is variable `b * n + i`. Every block keeps the
//! cover of its fixed-to-1 items incrementally; the cover is restored from a
//! per-block stack on backtrack.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::dataset::{MisProfile, TidSet, TransactionDataset};
use crate::error::MiningError;
use crate::propagators::{PropagationResult, Propagator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Unfixed,
    Zero,
    One,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TrailEntry {
    Fix(usize),
    CoverPush(usize),
}

/// Domains, incremental covers and the undo trail of one search.
#[derive(Clone)]
pub struct SearchState<'a> {
    ds: &'a TransactionDataset,
    n: usize,
    blocks: usize,
    domains: Vec<Domain>,
    ones: Vec<usize>,
    unfixed: Vec<usize>,
    covers: Vec<Vec<TidSet>>,
    spare: Vec<TidSet>,
    trail: Vec<TrailEntry>,
    marks: Vec<usize>,
}

impl<'a> SearchState<'a> {
    pub fn new(ds: &'a TransactionDataset, blocks: usize) -> Self {
        assert!(blocks >= 1, "a search needs at least one variable block");
        let n = ds.n();
        SearchState {
            ds,
            n,
            blocks,
            domains: vec![Domain::Unfixed; n * blocks],
            ones: vec![0; blocks],
            unfixed: vec![n; blocks],
            covers: (0..blocks).map(|_| vec![TidSet::full(ds.m())]).collect(),
            spare: Vec::new(),
            trail: Vec::new(),
            marks: Vec::new(),
        }
    }

    pub fn dataset(&self) -> &'a TransactionDataset {
        self.ds
    }

    /// Items per block.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    #[inline]
    pub fn var(&self, block: usize, item: usize) -> usize {
        debug_assert!(block < self.blocks && item < self.n);
        block * self.n + item
    }

    #[inline]
    pub fn domain(&self, block: usize, item: usize) -> Domain {
        self.domains[self.var(block, item)]
    }

    #[inline]
    pub fn is_unfixed(&self, block: usize, item: usize) -> bool {
        self.domain(block, item) == Domain::Unfixed
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    /// `|P|` of a block.
    pub fn ones(&self, block: usize) -> usize {
        self.ones[block]
    }

    /// `|U|` of a block.
    pub fn unfixed_count(&self, block: usize) -> usize {
        self.unfixed[block]
    }

    pub fn is_complete(&self) -> bool {
        self.unfixed.iter().all(|&u| u == 0)
    }

    /// Incrementally maintained `cover(P)` of a block.
    #[inline]
    pub fn cover(&self, block: usize) -> &TidSet {
        self.covers[block].last().expect("cover stack never empty")
    }

    /// `cover(P)` of a block recomputed from the dataset.
    pub fn recompute_cover(&self, block: usize) -> TidSet {
        self.ds.cover(&self.itemset(block))
    }

    /// Dense indices of the fixed-to-1 items of a block, ascending.
    pub fn itemset(&self, block: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.domain(block, i) == Domain::One)
            .collect()
    }

    pub fn unfixed_items(&self, block: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.is_unfixed(block, i))
    }

    /// Fixes an unfixed variable and records the change on the trail.
    ///
    /// Panics if the variable is already fixed.
    pub fn fix(&mut self, block: usize, item: usize, value: bool) {
        let var = self.var(block, item);
        assert_eq!(
            self.domains[var],
            Domain::Unfixed,
            "variable ({block}, {item}) is already fixed"
        );
        self.unfixed[block] -= 1;
        self.trail.push(TrailEntry::Fix(var));
        if value {
            self.domains[var] = Domain::One;
            self.ones[block] += 1;
            let mut next = self
                .spare
                .pop()
                .unwrap_or_else(|| TidSet::empty(self.ds.m()));
            next.copy_from(self.cover(block));
            next.intersect_with(self.ds.item_cover(item));
            self.covers[block].push(next);
            self.trail.push(TrailEntry::CoverPush(block));
        } else {
            self.domains[var] = Domain::Zero;
        }
    }

    /// Current decision level.
    pub fn level(&self) -> usize {
        self.marks.len()
    }

    pub fn push_level(&mut self) {
        self.marks.push(self.trail.len());
    }

    /// Undoes every change made since the matching [`push_level`](Self::push_level).
    pub fn pop_level(&mut self) {
        let mark = self.marks.pop().expect("pop_level without push_level");
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                TrailEntry::Fix(var) => {
                    let block = var / self.n;
                    if self.domains[var] == Domain::One {
                        self.ones[block] -= 1;
                    }
                    self.domains[var] = Domain::Unfixed;
                    self.unfixed[block] += 1;
                }
                TrailEntry::CoverPush(block) => {
                    let old = self.covers[block].pop().unwrap();
                    self.spare.push(old);
                }
            }
        }
    }
}

impl fmt::Debug for SearchState<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("SearchState");
        for b in 0..self.blocks {
            let row: String = (0..self.n)
                .map(|i| match self.domain(b, i) {
                    Domain::Unfixed => '.',
                    Domain::Zero => '0',
                    Domain::One => '1',
                })
                .collect();
            s.field("block", &row);
        }
        s.field("level", &self.level()).finish()
    }
}

/// Variable ordering.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Heuristic {
    /// Smallest minimum item support first, ties by (block, item index).
    #[default]
    MinMis,
    /// Block by block, items by ascending external label.
    Lex,
}

impl FromStr for Heuristic {
    type Err = MiningError;

    fn from_str(s: &str) -> Result<Self, MiningError> {
        match s.to_ascii_lowercase().as_str() {
            "minmis" => Ok(Heuristic::MinMis),
            "lex" => Ok(Heuristic::Lex),
            other => Err(MiningError::InvalidArgument(format!(
                "unknown ordering `{other}` (expected minmis or lex)"
            ))),
        }
    }
}

/// The unfixed variable with the smallest support, ties broken by the
/// smallest (block, item index). `None` once every variable is fixed.
pub fn select_variable_minmis(
    state: &SearchState<'_>,
    profile: &MisProfile,
) -> Option<(usize, usize)> {
    let mut best: Option<(u64, usize, usize)> = None;
    for block in 0..state.blocks() {
        for item in state.unfixed_items(block) {
            let key = (profile.get(item), block, item);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
    }
    best.map(|(_, block, item)| (block, item))
}

/// A set of propagators over one or `k` variable blocks.
pub struct Model<'a> {
    ds: &'a TransactionDataset,
    profile: &'a MisProfile,
    blocks: usize,
    propagators: Vec<Box<dyn Propagator>>,
    heuristic: Heuristic,
    emit_empty: bool,
}

impl<'a> Model<'a> {
    pub fn new(ds: &'a TransactionDataset, profile: &'a MisProfile, blocks: usize) -> Self {
        assert_eq!(profile.len(), ds.n(), "profile does not match dataset");
        assert!(blocks >= 1, "a model needs at least one variable block");
        Model {
            ds,
            profile,
            blocks,
            propagators: Vec::new(),
            heuristic: Heuristic::default(),
            emit_empty: false,
        }
    }

    /// Adds a propagator. Panics if it refers to a block outside the model.
    pub fn post(&mut self, propagator: Box<dyn Propagator>) -> &mut Self {
        for &b in propagator.scope() {
            assert!(
                b < self.blocks,
                "{} refers to block {b} of {}",
                propagator.name(),
                self.blocks
            );
        }
        self.propagators.push(propagator);
        self
    }

    pub fn with_heuristic(mut self, heuristic: Heuristic) -> Self {
        self.heuristic = heuristic;
        self
    }

    pub fn with_emit_empty(mut self, emit_empty: bool) -> Self {
        self.emit_empty = emit_empty;
        self
    }

    pub fn dataset(&self) -> &'a TransactionDataset {
        self.ds
    }

    pub fn profile(&self) -> &'a MisProfile {
        self.profile
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn heuristic(&self) -> Heuristic {
        self.heuristic
    }

    pub fn emit_empty(&self) -> bool {
        self.emit_empty
    }

    pub fn propagators(&self) -> &[Box<dyn Propagator>] {
        &self.propagators
    }

    pub fn initial_state(&self) -> SearchState<'a> {
        SearchState::new(self.ds, self.blocks)
    }

    /// Static branching order as `(block, item)` pairs.
    fn variable_order(&self) -> Vec<(usize, usize)> {
        let n = self.ds.n();
        let mut order: Vec<(usize, usize)> = (0..self.blocks)
            .flat_map(|b| (0..n).map(move |i| (b, i)))
            .collect();
        match self.heuristic {
            Heuristic::MinMis => order.sort_by_key(|&(b, i)| (self.profile.get(i), b, i)),
            Heuristic::Lex => order.sort_by_key(|&(b, i)| (b, self.ds.label_rank(i))),
        }
        order
    }
}

impl fmt::Debug for Model<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("blocks", &self.blocks)
            .field("propagators", &self.propagators)
            .field("heuristic", &self.heuristic)
            .field("emit_empty", &self.emit_empty)
            .finish()
    }
}

/// Runs every propagator until a full pass changes nothing or one fails.
///
/// Returns `Changed` if any domain was narrowed, `Stable` if none was.
pub fn propagate_fixpoint(model: &Model<'_>, state: &mut SearchState<'_>) -> PropagationResult {
    let mut any = false;
    loop {
        let mut changed = false;
        for p in model.propagators() {
            match p.propagate(state, model.profile()) {
                PropagationResult::Failure => return PropagationResult::Failure,
                PropagationResult::Changed => changed = true,
                PropagationResult::Stable => {}
            }
        }
        if !changed {
            break;
        }
        any = true;
    }
    if any {
        PropagationResult::Changed
    } else {
        PropagationResult::Stable
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub solutions: u64,
    /// Branching decisions applied.
    pub nodes: u64,
    /// Propagation failures.
    pub fails: u64,
    pub elapsed: Duration,
    /// Time spent in propagation; only measured when requested.
    pub propagation: Duration,
    /// Fixpoint calls, one per visited node.
    pub propagations: u64,
    /// False if a limit stopped the search early.
    pub complete: bool,
}

impl SearchStats {
    /// Equality of everything except timings.
    pub fn same_counts(&self, other: &SearchStats) -> bool {
        (
            self.solutions,
            self.nodes,
            self.fails,
            self.propagations,
            self.complete,
        ) == (
            other.solutions,
            other.nodes,
            other.fails,
            other.propagations,
            other.complete,
        )
    }
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sol={} nodes={} fails={} ms={}",
            self.solutions,
            self.nodes,
            self.fails,
            self.elapsed.as_millis()
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_nodes: Option<u64>,
    pub max_solutions: Option<u64>,
    /// Measure time spent in [`propagate_fixpoint`].
    pub time_propagation: bool,
}

/// One solution: per block, the itemset as sorted external labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution {
    pub itemsets: Vec<Vec<u64>>,
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, set) in self.itemsets.iter().enumerate() {
            if b > 0 {
                f.write_str(" | ")?;
            }
            for (j, label) in set.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{label}")?;
            }
        }
        Ok(())
    }
}

/// A complete assignment handed to the solution visitor.
pub struct Assignment<'s, 'a> {
    state: &'s SearchState<'a>,
}

impl Assignment<'_, '_> {
    pub fn blocks(&self) -> usize {
        self.state.blocks()
    }

    /// Dense item indices of a block.
    pub fn items(&self, block: usize) -> Vec<usize> {
        self.state.itemset(block)
    }

    /// Sorted external labels of a block.
    pub fn labels(&self, block: usize) -> Vec<u64> {
        let ds = self.state.dataset();
        let mut labels: Vec<u64> = self
            .state
            .itemset(block)
            .into_iter()
            .map(|i| ds.label(i))
            .collect();
        labels.sort_unstable();
        labels
    }

    pub fn to_solution(&self) -> Solution {
        Solution {
            itemsets: (0..self.blocks()).map(|b| self.labels(b)).collect(),
        }
    }

    pub fn state(&self) -> &SearchState<'_> {
        self.state
    }
}

struct Dfs<'m, 'a, F> {
    model: &'m Model<'a>,
    config: SearchConfig,
    order: Vec<(usize, usize)>,
    stats: SearchStats,
    visit: F,
    stopped: bool,
}

impl<F> Dfs<'_, '_, F>
where
    F: FnMut(&Assignment<'_, '_>) -> ControlFlow<()>,
{
    fn propagate(&mut self, state: &mut SearchState<'_>) -> PropagationResult {
        self.stats.propagations += 1;
        if self.config.time_propagation {
            let start = Instant::now();
            let r = propagate_fixpoint(self.model, state);
            self.stats.propagation += start.elapsed();
            r
        } else {
            propagate_fixpoint(self.model, state)
        }
    }

    fn node(&mut self, state: &mut SearchState<'_>) {
        if self.propagate(state) == PropagationResult::Failure {
            self.stats.fails += 1;
            return;
        }
        let next = self
            .order
            .iter()
            .copied()
            .find(|&(b, i)| state.is_unfixed(b, i));
        let Some((block, item)) = next else {
            self.leaf(state);
            return;
        };
        for value in [true, false] {
            if self.stopped {
                return;
            }
            if self
                .config
                .max_nodes
                .is_some_and(|max| self.stats.nodes >= max)
            {
                self.stopped = true;
                return;
            }
            state.push_level();
            state.fix(block, item, value);
            self.stats.nodes += 1;
            self.node(state);
            state.pop_level();
        }
    }

    fn leaf(&mut self, state: &SearchState<'_>) {
        if !self.model.emit_empty() && (0..state.blocks()).any(|b| state.ones(b) == 0) {
            return;
        }
        self.stats.solutions += 1;
        if (self.visit)(&Assignment { state }).is_break()
            || self
                .config
                .max_solutions
                .is_some_and(|max| self.stats.solutions >= max)
        {
            self.stopped = true;
        }
    }
}

/// Enumerates every solution of `model` depth-first, value 1 before value 0.
///
/// `visit` is called once per solution in search order; returning
/// `ControlFlow::Break` stops the search.
pub fn search<F>(model: &Model<'_>, config: SearchConfig, visit: F) -> SearchStats
where
    F: FnMut(&Assignment<'_, '_>) -> ControlFlow<()>,
{
    let start = Instant::now();
    let mut state = model.initial_state();
    let mut dfs = Dfs {
        model,
        config,
        order: model.variable_order(),
        stats: SearchStats::default(),
        visit,
        stopped: false,
    };
    dfs.node(&mut state);
    let mut stats = dfs.stats;
    stats.complete = !dfs.stopped;
    stats.elapsed = start.elapsed();
    stats
}

/// Collects every solution.
pub fn solve_all(model: &Model<'_>) -> (Vec<Solution>, SearchStats) {
    let mut out = Vec::new();
    let stats = search(model, SearchConfig::default(), |a| {
        out.push(a.to_solution());
        ControlFlow::Continue(())
    });
    (out, stats)
}

/// Counts solutions without materialising them.
pub fn count(model: &Model<'_>) -> SearchStats {
    search(
        model,
        SearchConfig::default(),
        |_| ControlFlow::Continue(()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_fimi;
    use crate::propagators::FreqRare;

    const EXAMPLE: &str = "1 2 4\n1 3 4\n1 2 3 4\n2 3\n1 2 3\n";

    fn example() -> (TransactionDataset, MisProfile) {
        let ds = parse_fimi(EXAMPLE.as_bytes()).unwrap();
        let s = MisProfile::from_labels(&ds, &[(1, 4), (2, 3), (3, 3), (4, 1)]).unwrap();
        (ds, s)
    }

    fn q0<'a>(ds: &'a TransactionDataset, s: &'a MisProfile, h: Heuristic) -> Model<'a> {
        let mut model = Model::new(ds, s, 1).with_heuristic(h);
        model.post(Box::new(FreqRare::new(0)));
        model
    }

    #[test]
    fn fixpoint_without_propagators_is_stable() {
        let (ds, s) = example();
        let model = Model::new(&ds, &s, 1);
        let mut state = model.initial_state();
        assert_eq!(
            propagate_fixpoint(&model, &mut state),
            PropagationResult::Stable
        );
    }

    #[test]
    fn fixpoint_at_root_prunes_nothing_on_example() {
        let (ds, s) = example();
        let model = q0(&ds, &s, Heuristic::MinMis);
        let mut state = model.initial_state();
        assert_eq!(
            propagate_fixpoint(&model, &mut state),
            PropagationResult::Stable
        );
        assert_eq!(state.unfixed_count(0), 4);
    }

    #[test]
    fn fixpoint_with_uniform_five_clears_everything() {
        let (ds, _) = example();
        let s = MisProfile::uniform(4, 5).unwrap();
        let model = q0(&ds, &s, Heuristic::MinMis);
        let mut state = model.initial_state();
        assert_eq!(
            propagate_fixpoint(&model, &mut state),
            PropagationResult::Changed
        );
        assert!(state.domains().iter().all(|&d| d == Domain::Zero));
    }

    #[test]
    fn q0_search_on_example() {
        let (ds, s) = example();
        let (sols, stats) = solve_all(&q0(&ds, &s, Heuristic::MinMis));
        assert_eq!(sols.len(), 14);
        assert_eq!(stats.solutions, 14);
        assert_eq!(stats.fails, 0);
        assert!(stats.complete);
        assert!(!sols.iter().any(|s| s.itemsets[0] == vec![1, 2, 3]));
    }

    #[test]
    fn lex_order_hits_the_dead_branch() {
        let (ds, s) = example();
        let (mut lex, stats) = solve_all(&q0(&ds, &s, Heuristic::Lex));
        assert!(stats.fails >= 1);
        let (mut minmis, _) = solve_all(&q0(&ds, &s, Heuristic::MinMis));
        lex.sort();
        minmis.sort();
        assert_eq!(lex, minmis);
    }

    #[test]
    fn unsatisfiable_threshold_yields_no_failure_when_root_prunes() {
        let (ds, _) = example();
        let s = MisProfile::uniform(4, 5).unwrap();
        let (sols, stats) = solve_all(&q0(&ds, &s, Heuristic::MinMis));
        assert!(sols.is_empty());
        assert_eq!((stats.fails, stats.nodes), (0, 0));
    }

    #[test]
    fn threshold_above_m_fails_once_at_root() {
        let (ds, _) = example();
        let s = MisProfile::uniform(4, 6).unwrap();
        let (sols, stats) = solve_all(&q0(&ds, &s, Heuristic::MinMis));
        assert!(sols.is_empty());
        assert_eq!((stats.fails, stats.nodes), (1, 0));
    }

    #[test]
    fn minmis_selection() {
        let (ds, s) = example();
        let mut state = SearchState::new(&ds, 1);
        let d = ds.index_of(4).unwrap();
        assert_eq!(select_variable_minmis(&state, &s), Some((0, d)));
        state.fix(0, d, false);
        // B and C both have support 3; B has the lower index
        assert_eq!(
            select_variable_minmis(&state, &s),
            Some((0, ds.index_of(2).unwrap()))
        );
        for i in 0..ds.n() {
            if state.is_unfixed(0, i) {
                state.fix(0, i, true);
            }
        }
        assert_eq!(select_variable_minmis(&state, &s), None);
    }

    #[test]
    fn undo_restores_domains_and_cover() {
        let (ds, _) = example();
        let mut state = SearchState::new(&ds, 2);
        let before = (state.domains().to_vec(), state.cover(0).clone());
        state.push_level();
        state.fix(0, 0, true);
        state.fix(0, 1, true);
        state.fix(1, 0, false);
        assert_eq!(state.cover(0), &state.recompute_cover(0));
        assert_eq!(state.cover(0).count(), 3);
        state.pop_level();
        assert_eq!((state.domains().to_vec(), state.cover(0).clone()), before);
        assert_eq!(state.ones(0), 0);
        assert_eq!(state.unfixed_count(1), ds.n());
    }

    #[test]
    fn node_and_solution_limits() {
        let (ds, s) = example();
        let model = q0(&ds, &s, Heuristic::MinMis);
        let stats = search(
            &model,
            SearchConfig {
                max_solutions: Some(3),
                ..Default::default()
            },
            |_| ControlFlow::Continue(()),
        );
        assert_eq!(stats.solutions, 3);
        assert!(!stats.complete);
        let stats = search(
            &model,
            SearchConfig {
                max_nodes: Some(2),
                ..Default::default()
            },
            |_| ControlFlow::Continue(()),
        );
        assert_eq!(stats.nodes, 2);
        assert!(!stats.complete);
    }

    #[test]
    fn solution_display() {
        let sol = Solution {
            itemsets: vec![vec![1, 2], vec![3]],
        };
        assert_eq!(sol.to_string(), "1 2 | 3");
    }
}
