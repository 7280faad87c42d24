//! Transaction datasets, vertical covers and minimum item support profiles.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use num_rational::Ratio;

use crate::error::{MiningError, Result};

const WORD_BITS: usize = 64;

/// A set of transaction ids stored as a fixed-length bit-vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TidSet {
    words: Vec<u64>,
    len: usize,
}

impl TidSet {
    pub fn empty(len: usize) -> Self {
        TidSet {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut set = TidSet {
            words: vec![u64::MAX; len.div_ceil(WORD_BITS)],
            len,
        };
        set.clear_tail();
        set
    }

    /// Number of bit positions (the transaction count of the owning dataset).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn contains(&self, tid: usize) -> bool {
        assert!(
            tid < self.len,
            "transaction {tid} out of range {}",
            self.len
        );
        self.words[tid / WORD_BITS] & (1 << (tid % WORD_BITS)) != 0
    }

    pub fn insert(&mut self, tid: usize) {
        assert!(
            tid < self.len,
            "transaction {tid} out of range {}",
            self.len
        );
        self.words[tid / WORD_BITS] |= 1 << (tid % WORD_BITS);
    }

    pub fn intersect_with(&mut self, other: &TidSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    /// `|self ∩ other|` without materialising the intersection.
    #[inline]
    pub fn intersection_count(&self, other: &TidSet) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn copy_from(&mut self, other: &TidSet) {
        debug_assert_eq!(self.len, other.len);
        self.words.copy_from_slice(&other.words);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * WORD_BITS + tz)
            })
        })
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for TidSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// An immutable bag of transactions over a dense item universe `0..n`.
///
/// Items keep their external (file) ids as labels; dense indices follow the
/// order in which ids first appear in the input. Covers are stored
/// vertically, one bit-vector of length `m` per item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransactionDataset {
    labels: Vec<u64>,
    index: HashMap<u64, usize>,
    transactions: Vec<Vec<usize>>,
    covers: Vec<TidSet>,
    label_order: Vec<usize>,
    label_rank: Vec<usize>,
}

impl TransactionDataset {
    /// Builds a dataset from transactions given as external item ids.
    /// Repeated ids inside one transaction are collapsed.
    pub fn from_transactions<T, I>(transactions: T) -> Result<Self>
    where
        T: IntoIterator<Item = I>,
        I: IntoIterator<Item = u64>,
    {
        let mut labels = Vec::new();
        let mut index = HashMap::new();
        let mut dense = Vec::new();
        for transaction in transactions {
            let mut row: Vec<usize> = Vec::new();
            for label in transaction {
                let next = labels.len();
                let item = *index.entry(label).or_insert_with(|| {
                    labels.push(label);
                    next
                });
                if !row.contains(&item) {
                    row.push(item);
                }
            }
            dense.push(row);
        }
        if dense.is_empty() {
            return Err(MiningError::EmptyDataset);
        }

        let m = dense.len();
        let mut covers = vec![TidSet::empty(m); labels.len()];
        for (tid, row) in dense.iter().enumerate() {
            for &item in row {
                covers[item].insert(tid);
            }
        }

        let mut label_order: Vec<usize> = (0..labels.len()).collect();
        label_order.sort_by_key(|&i| labels[i]);
        let mut label_rank = vec![0; labels.len()];
        for (rank, &item) in label_order.iter().enumerate() {
            label_rank[item] = rank;
        }

        Ok(TransactionDataset {
            labels,
            index,
            transactions: dense,
            covers,
            label_order,
            label_rank,
        })
    }

    /// Item count.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Transaction count.
    pub fn m(&self) -> usize {
        self.transactions.len()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, item: usize) -> u64 {
        self.labels[item]
    }

    pub fn index_of(&self, label: u64) -> Option<usize> {
        self.index.get(&label).copied()
    }

    /// Transactions as dense item indices, in input order.
    pub fn transactions(&self) -> &[Vec<usize>] {
        &self.transactions
    }

    pub fn item_cover(&self, item: usize) -> &TidSet {
        &self.covers[item]
    }

    pub fn item_frequency(&self, item: usize) -> usize {
        self.covers[item].count()
    }

    /// Dense item indices sorted by ascending external label.
    pub fn label_order(&self) -> &[usize] {
        &self.label_order
    }

    /// Position of `item` in [`label_order`](Self::label_order).
    pub fn label_rank(&self, item: usize) -> usize {
        self.label_rank[item]
    }

    /// Intersection of the item covers; the full transaction set for `∅`.
    ///
    /// Panics if an index is out of range.
    pub fn cover(&self, itemset: &[usize]) -> TidSet {
        let mut cover = TidSet::full(self.m());
        for &item in itemset {
            assert!(item < self.n(), "item {item} out of range {}", self.n());
            cover.intersect_with(&self.covers[item]);
        }
        cover
    }

    pub fn frequency(&self, itemset: &[usize]) -> usize {
        self.cover(itemset).count()
    }

    /// Resolves external labels to dense indices.
    pub fn items_of(&self, labels: &[u64]) -> Option<Vec<usize>> {
        labels.iter().map(|l| self.index_of(*l)).collect()
    }

    pub fn stats(&self) -> DatasetStats {
        let occurrences: usize = self.transactions.iter().map(Vec::len).sum();
        let m = self.m() as u64;
        let n = self.n().max(1) as u64;
        DatasetStats {
            transactions: self.m(),
            items: self.n(),
            occurrences,
            avg_transaction_size: Ratio::new(occurrences as u64, m),
            density: Ratio::new(occurrences as u64, m * n),
        }
    }
}

/// Parses the FIMI transaction format: one transaction per nonblank line,
/// whitespace-separated non-negative integer item ids.
pub fn parse_fimi<R: BufRead>(reader: R) -> Result<TransactionDataset> {
    let mut rows = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u64>().map_err(|_| MiningError::Parse {
                    line: lineno + 1,
                    message: format!("invalid item id `{tok}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(MiningError::Parse {
            line: 0,
            message: "dataset contains no transactions".into(),
        });
    }
    TransactionDataset::from_transactions(rows)
}

/// Writes the dataset back in FIMI format using the original labels.
pub fn serialize_fimi(ds: &TransactionDataset) -> String {
    let mut out = String::new();
    for row in ds.transactions() {
        let line: Vec<String> = row.iter().map(|&i| ds.label(i).to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Summary characteristics of a dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetStats {
    pub transactions: usize,
    pub items: usize,
    /// Total number of item occurrences over all transactions.
    pub occurrences: usize,
    pub avg_transaction_size: Ratio<u64>,
    /// `avg_transaction_size / items`.
    pub density: Ratio<u64>,
}

impl DatasetStats {
    pub fn density_percent(&self) -> f64 {
        100.0 * *self.density.numer() as f64 / *self.density.denom() as f64
    }

    pub fn avg_size(&self) -> f64 {
        *self.avg_transaction_size.numer() as f64 / *self.avg_transaction_size.denom() as f64
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} transactions, {} items, density {:.1}%",
            self.transactions,
            self.items,
            self.density_percent()
        )
    }
}

/// Per-item absolute minimum supports, indexed by dense item index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MisProfile {
    supports: Vec<u64>,
}

impl MisProfile {
    pub fn new(supports: Vec<u64>) -> Result<Self> {
        if let Some(pos) = supports.iter().position(|&s| s < 1) {
            return Err(MiningError::InvalidArgument(format!(
                "minimum support of item index {pos} must be at least 1"
            )));
        }
        Ok(MisProfile { supports })
    }

    pub fn uniform(n: usize, support: u64) -> Result<Self> {
        Self::new(vec![support; n])
    }

    /// Builds a profile from `(external label, support)` pairs covering every
    /// item of `ds`.
    pub fn from_labels(ds: &TransactionDataset, pairs: &[(u64, u64)]) -> Result<Self> {
        let mut supports = vec![0; ds.n()];
        for &(label, s) in pairs {
            let item = ds.index_of(label).ok_or(MiningError::UnknownItem {
                line: 0,
                item: label,
            })?;
            supports[item] = s;
        }
        if let Some(item) = supports.iter().position(|&s| s == 0) {
            return Err(MiningError::MissingItem(ds.label(item)));
        }
        Self::new(supports)
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    #[inline]
    pub fn get(&self, item: usize) -> u64 {
        self.supports[item]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.supports
    }

    pub fn min(&self) -> Option<u64> {
        self.supports.iter().copied().min()
    }

    pub fn max(&self) -> Option<u64> {
        self.supports.iter().copied().max()
    }
}

/// Rounding applied when a relative threshold is turned into a count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Rounding {
    #[default]
    Ceil,
    Floor,
    HalfUp,
}

impl Rounding {
    pub fn apply(self, value: Ratio<u64>) -> u64 {
        let (num, den) = (*value.numer(), *value.denom());
        match self {
            Rounding::Ceil => num.div_ceil(den),
            Rounding::Floor => num / den,
            Rounding::HalfUp => (2 * num + den) / (2 * den),
        }
    }
}

impl std::str::FromStr for Rounding {
    type Err = MiningError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ceil" => Ok(Rounding::Ceil),
            "floor" => Ok(Rounding::Floor),
            "half-up" | "round" | "round-half-up" => Ok(Rounding::HalfUp),
            other => Err(MiningError::InvalidArgument(format!(
                "unknown rounding `{other}` (expected ceil, floor or half-up)"
            ))),
        }
    }
}

/// The lowest support any item may receive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MisMin {
    /// An absolute transaction count, at least 1.
    Absolute(u64),
    /// A fraction of the transaction count in `(0, 1]`.
    Relative(Ratio<u64>),
}

/// `s_i = max(round(beta * freq(i)), round(mis_min))`, never below 1.
pub fn assign_mis(
    ds: &TransactionDataset,
    beta: Ratio<u64>,
    mis_min: MisMin,
    rounding: Rounding,
) -> Result<MisProfile> {
    if beta > Ratio::from_integer(1) {
        return Err(MiningError::InvalidArgument(format!(
            "beta must lie in [0, 1], got {beta}"
        )));
    }
    let floor = match mis_min {
        MisMin::Absolute(0) => {
            return Err(MiningError::InvalidArgument(
                "absolute minimum support must be at least 1".into(),
            ))
        }
        MisMin::Absolute(count) => count,
        MisMin::Relative(frac) => {
            if frac == Ratio::from_integer(0) || frac > Ratio::from_integer(1) {
                return Err(MiningError::InvalidArgument(format!(
                    "relative minimum support must lie in (0, 1], got {frac}"
                )));
            }
            rounding.apply(frac * Ratio::from_integer(ds.m() as u64))
        }
    };
    let supports = (0..ds.n())
        .map(|i| {
            let scaled = rounding.apply(beta * Ratio::from_integer(ds.item_frequency(i) as u64));
            scaled.max(floor).max(1)
        })
        .collect();
    MisProfile::new(supports)
}

/// Parses a non-negative fraction written as a decimal (`0.25`), a ratio
/// (`1/4`) or a percentage (`25%`).
pub fn parse_fraction(text: &str) -> Result<Ratio<u64>> {
    let bad = || MiningError::InvalidArgument(format!("not a non-negative number: `{text}`"));
    let text = text.trim();
    if let Some(pct) = text.strip_suffix('%') {
        return Ok(parse_fraction(pct)? / Ratio::from_integer(100));
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: u64 = num.trim().parse().map_err(|_| bad())?;
        let den: u64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(num, den));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
        || frac.len() > 18
    {
        return Err(bad());
    }
    let den = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let frac: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    let num = int
        .checked_mul(den)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Ratio::new(num, den))
}

/// Reads a MIS file: one `external_item_id absolute_support` pair per line.
/// Every item of `ds` must be given exactly once.
pub fn read_mis<R: BufRead>(reader: R, ds: &TransactionDataset) -> Result<MisProfile> {
    let mut supports = vec![0u64; ds.n()];
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let mut tokens = line.split_whitespace();
        let Some(first) = tokens.next() else { continue };
        let parse_err = |message: String| MiningError::Parse {
            line: lineno,
            message,
        };
        let label: u64 = first
            .parse()
            .map_err(|_| parse_err(format!("invalid item id `{first}`")))?;
        let support_tok = tokens
            .next()
            .ok_or_else(|| parse_err("missing support value".into()))?;
        let support: u64 = support_tok
            .parse()
            .map_err(|_| parse_err(format!("invalid support `{support_tok}`")))?;
        if tokens.next().is_some() {
            return Err(parse_err("trailing tokens".into()));
        }
        if support < 1 {
            return Err(parse_err("support must be at least 1".into()));
        }
        let item = ds.index_of(label).ok_or(MiningError::UnknownItem {
            line: lineno,
            item: label,
        })?;
        if supports[item] != 0 {
            return Err(parse_err(format!("duplicate entry for item {label}")));
        }
        supports[item] = support;
    }
    if let Some(item) = supports.iter().position(|&s| s == 0) {
        return Err(MiningError::MissingItem(ds.label(item)));
    }
    MisProfile::new(supports)
}

/// Writes a profile in the format accepted by [`read_mis`], in dense order.
pub fn write_mis<W: Write>(
    mut out: W,
    ds: &TransactionDataset,
    profile: &MisProfile,
) -> std::io::Result<()> {
    for item in 0..ds.n() {
        writeln!(out, "{} {}", ds.label(item), profile.get(item))?;
    }
    Ok(())
}
