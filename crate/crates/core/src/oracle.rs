//! Brute-force reference enumerators.
//!
//! Nothing here touches the vertical covers or the search engine: each
//! candidate itemset is checked by scanning the transactions as item
//! bitmasks. Results are itemsets of external labels in canonical order
//! (by size, then lexicographically).

use std::cmp::Ordering;

use crate::dataset::{MisProfile, TransactionDataset};
use crate::engine::Solution;
use crate::error::{MiningError, Result};
use crate::queries::Q3Mode;

pub type Itemset = Vec<u64>;

/// Size guards for exhaustive enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimit {
    pub max_items: usize,
    /// Item guard for k-pattern enumeration.
    pub max_items_q3: usize,
    pub max_k: usize,
}

impl Default for OracleLimit {
    fn default() -> Self {
        OracleLimit {
            max_items: 25,
            max_items_q3: 10,
            max_k: 3,
        }
    }
}

fn guard(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(MiningError::GuardExceeded {
            what,
            actual,
            limit,
        })
    } else {
        Ok(())
    }
}

/// Canonical itemset order: by size, then lexicographic.
pub fn canonical_cmp(a: &[u64], b: &[u64]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn transaction_masks(ds: &TransactionDataset) -> Vec<u64> {
    ds.transactions()
        .iter()
        .map(|row| row.iter().fold(0u64, |acc, &i| acc | (1 << i)))
        .collect()
}

fn mask_labels(ds: &TransactionDataset, mask: u64) -> Itemset {
    let mut labels: Vec<u64> = (0..ds.n())
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| ds.label(i))
        .collect();
    labels.sort_unstable();
    labels
}

/// The MIS frequency condition `freq(P) >= min_{i in P} s_i` for a nonempty
/// itemset of dense indices, with `freq` counted by a transaction scan.
pub fn is_mis_frequent(ds: &TransactionDataset, profile: &MisProfile, itemset: &[usize]) -> bool {
    let Some(min) = itemset.iter().map(|&i| profile.get(i)).min() else {
        return false;
    };
    let freq = ds
        .transactions()
        .iter()
        .filter(|row| itemset.iter().all(|i| row.contains(i)))
        .count();
    freq as u64 >= min
}

/// Evaluates the reified CP4IM-style model on a complete assignment:
/// `y_j <-> (x ⊆ t_j)` for every transaction and, for every item with
/// `x_i = 1`, `sum_j y_j D_ij >= min_{k : x_k != 0} s_k`.
pub fn reified_mis_holds(ds: &TransactionDataset, profile: &MisProfile, x: &[bool]) -> bool {
    assert_eq!(x.len(), ds.n());
    let y: Vec<bool> = ds
        .transactions()
        .iter()
        .map(|row| (0..ds.n()).all(|i| !x[i] || row.contains(&i)))
        .collect();
    let Some(min) = (0..ds.n()).filter(|&k| x[k]).map(|k| profile.get(k)).min() else {
        return true;
    };
    (0..ds.n()).filter(|&i| x[i]).all(|i| {
        let support = ds
            .transactions()
            .iter()
            .zip(&y)
            .filter(|(row, &yj)| yj && row.contains(&i))
            .count();
        support as u64 >= min
    })
}

/// Every nonempty itemset satisfying the MIS frequency condition.
pub fn oracle_q0(
    ds: &TransactionDataset,
    profile: &MisProfile,
    limit: OracleLimit,
) -> Result<Vec<Itemset>> {
    guard("item count", ds.n(), limit.max_items.min(63))?;
    let masks = transaction_masks(ds);
    let n = ds.n();
    let mut out = Vec::new();
    for p in 1u64..(1u64 << n) {
        let freq = masks.iter().filter(|&&t| t & p == p).count() as u64;
        let min = (0..n)
            .filter(|i| p & (1 << i) != 0)
            .map(|i| profile.get(i))
            .min()
            .unwrap();
        if freq >= min {
            out.push(mask_labels(ds, p));
        }
    }
    out.sort_by(|a, b| canonical_cmp(a, b));
    Ok(out)
}

/// Keeps itemsets whose pairwise support distance is at most `ub` and whose
/// size is at least `card`.
pub fn oracle_filter(
    ds: &TransactionDataset,
    itemsets: &[Itemset],
    profile: &MisProfile,
    ub: Option<u64>,
    card: Option<usize>,
) -> Vec<Itemset> {
    itemsets
        .iter()
        .filter(|set| card.is_none_or(|c| set.len() >= c))
        .filter(|set| {
            let Some(ub) = ub else { return true };
            let supports: Vec<u64> = set
                .iter()
                .map(|&l| profile.get(ds.index_of(l).expect("label from dataset")))
                .collect();
            supports
                .iter()
                .all(|&a| supports.iter().all(|&b| a.abs_diff(b) <= ub))
        })
        .cloned()
        .collect()
}

/// All k-pattern sets over the Q2 solutions. Unordered k-sets in canonical
/// order, or every permutation of each when `ordered` is set.
#[allow(clippy::too_many_arguments)]
pub fn oracle_q3(
    ds: &TransactionDataset,
    profile: &MisProfile,
    k: usize,
    ub: u64,
    card: usize,
    mode: Q3Mode,
    ordered: bool,
    limit: OracleLimit,
) -> Result<Vec<Vec<Itemset>>> {
    guard("item count", ds.n(), limit.max_items_q3)?;
    guard("pattern count", k, limit.max_k)?;
    let base = oracle_filter(
        ds,
        &oracle_q0(ds, profile, limit)?,
        profile,
        Some(ub),
        Some(card),
    );
    let compatible = |a: &Itemset, b: &Itemset| match mode {
        Q3Mode::Disjoint => a.iter().all(|x| !b.contains(x)),
        Q3Mode::Distinct => a != b,
    };

    let mut combos = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn extend(
        base: &[Itemset],
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        ok: &dyn Fn(&Itemset, &Itemset) -> bool,
        out: &mut Vec<Vec<Itemset>>,
    ) {
        if chosen.len() == k {
            out.push(chosen.iter().map(|&i| base[i].clone()).collect());
            return;
        }
        for next in start..base.len() {
            if chosen.iter().all(|&c| ok(&base[c], &base[next])) {
                chosen.push(next);
                extend(base, k, next + 1, chosen, ok, out);
                chosen.pop();
            }
        }
    }
    if k > 0 {
        extend(&base, k, 0, &mut chosen, &compatible, &mut combos);
    }
    if !ordered {
        return Ok(combos);
    }
    let mut out = Vec::new();
    for combo in combos {
        permutations(
            &combo,
            &mut Vec::new(),
            &mut vec![false; combo.len()],
            &mut out,
        );
    }
    out.sort();
    Ok(out)
}

fn permutations(
    items: &[Itemset],
    current: &mut Vec<Itemset>,
    used: &mut [bool],
    out: &mut Vec<Vec<Itemset>>,
) {
    if current.len() == items.len() {
        out.push(current.clone());
        return;
    }
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            current.push(items[i].clone());
            permutations(items, current, used, out);
            current.pop();
            used[i] = false;
        }
    }
}

/// Single-block solutions as a canonical itemset list.
pub fn normalize_itemsets(solutions: &[Solution]) -> Vec<Itemset> {
    let mut out: Vec<Itemset> = solutions
        .iter()
        .map(|s| {
            assert_eq!(s.itemsets.len(), 1, "expected single-block solutions");
            s.itemsets[0].clone()
        })
        .collect();
    out.sort_by(|a, b| canonical_cmp(a, b));
    out
}

/// Multi-block solutions as sorted k-sets (each set's members in canonical
/// order), comparable with unordered [`oracle_q3`] output.
pub fn normalize_sets(solutions: &[Solution]) -> Vec<Vec<Itemset>> {
    let mut out: Vec<Vec<Itemset>> = solutions
        .iter()
        .map(|s| {
            let mut sets = s.itemsets.clone();
            sets.sort_by(|a, b| canonical_cmp(a, b));
            sets
        })
        .collect();
    out.sort_by(|a, b| cmp_tuples(a, b));
    out
}

/// Multi-block solutions as a sorted list of ordered tuples.
pub fn normalize_tuples(solutions: &[Solution]) -> Vec<Vec<Itemset>> {
    let mut out: Vec<Vec<Itemset>> = solutions.iter().map(|s| s.itemsets.clone()).collect();
    out.sort();
    out
}

fn cmp_tuples(a: &[Itemset], b: &[Itemset]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| canonical_cmp(x, y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Sorts oracle k-sets the same way as [`normalize_sets`].
pub fn sort_sets(mut sets: Vec<Vec<Itemset>>) -> Vec<Vec<Itemset>> {
    for s in &mut sets {
        s.sort_by(|a, b| canonical_cmp(a, b));
    }
    sets.sort_by(|a, b| cmp_tuples(a, b));
    sets
}
