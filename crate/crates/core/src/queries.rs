//! The query models Q0 to Q3.
//!
//! * Q0: frequent itemsets under the MIS profile.
//! * Q1: Q0 plus a bound `ub` on the support distance between any two items.
//! * Q2: Q1 plus a minimum itemset size `c`.
//! * Q3: `k` itemsets, each satisfying Q2, pairwise disjoint (or, in
//!   `distinct` mode, pairwise different).

use std::fmt;
use std::str::FromStr;

use crate::dataset::{MisProfile, TransactionDataset};
use crate::engine::{solve_all, Heuristic, Model, SearchStats, Solution};
use crate::error::{MiningError, Result};
use crate::propagators::{Disjoint, DistanceMis, FreqRare, LexLess, MinCardinality};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryKind {
    Q0,
    Q1,
    Q2,
    Q3,
}

impl FromStr for QueryKind {
    type Err = MiningError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "q0" => Ok(QueryKind::Q0),
            "q1" => Ok(QueryKind::Q1),
            "q2" => Ok(QueryKind::Q2),
            "q3" => Ok(QueryKind::Q3),
            other => Err(MiningError::InvalidQuery(format!(
                "unknown query `{other}`"
            ))),
        }
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QueryKind::Q0 => "q0",
            QueryKind::Q1 => "q1",
            QueryKind::Q2 => "q2",
            QueryKind::Q3 => "q3",
        };
        f.write_str(s)
    }
}

/// How the `k` itemsets of Q3 must differ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Q3Mode {
    /// No shared item between any two itemsets.
    #[default]
    Disjoint,
    /// Pairwise different itemsets; tuples come out in canonical order.
    Distinct,
}

impl FromStr for Q3Mode {
    type Err = MiningError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "disjoint" => Ok(Q3Mode::Disjoint),
            "distinct" => Ok(Q3Mode::Distinct),
            other => Err(MiningError::InvalidQuery(format!(
                "unknown mode `{other}` (expected disjoint or distinct)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySpec {
    pub kind: QueryKind,
    pub ub: Option<u64>,
    pub card: Option<usize>,
    pub k: Option<usize>,
    pub mode: Q3Mode,
    /// Strict lex chain over the blocks in disjoint mode.
    pub symmetry_breaking: bool,
    pub heuristic: Heuristic,
}

impl QuerySpec {
    pub fn q0() -> Self {
        QuerySpec {
            kind: QueryKind::Q0,
            ub: None,
            card: None,
            k: None,
            mode: Q3Mode::Disjoint,
            symmetry_breaking: true,
            heuristic: Heuristic::MinMis,
        }
    }

    pub fn q1(ub: u64) -> Self {
        QuerySpec {
            kind: QueryKind::Q1,
            ub: Some(ub),
            ..Self::q0()
        }
    }

    pub fn q2(ub: u64, card: usize) -> Self {
        QuerySpec {
            kind: QueryKind::Q2,
            card: Some(card),
            ..Self::q1(ub)
        }
    }

    pub fn q3(k: usize, ub: u64, card: usize, mode: Q3Mode) -> Self {
        QuerySpec {
            kind: QueryKind::Q3,
            k: Some(k),
            mode,
            ..Self::q2(ub, card)
        }
    }

    pub fn with_heuristic(mut self, heuristic: Heuristic) -> Self {
        self.heuristic = heuristic;
        self
    }

    pub fn with_symmetry_breaking(mut self, on: bool) -> Self {
        self.symmetry_breaking = on;
        self
    }

    /// Number of variable blocks the model needs.
    pub fn blocks(&self) -> usize {
        match self.kind {
            QueryKind::Q3 => self.k.unwrap_or(0),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(MiningError::InvalidQuery(format!(
                    "{} requires {what}",
                    self.kind
                )))
            }
        };
        match self.kind {
            QueryKind::Q0 => Ok(()),
            QueryKind::Q1 => need(self.ub.is_some(), "an upper bound (ub)"),
            QueryKind::Q2 => {
                need(self.ub.is_some(), "an upper bound (ub)")?;
                need(self.card.is_some(), "a minimum cardinality (c)")
            }
            QueryKind::Q3 => {
                need(self.ub.is_some(), "an upper bound (ub)")?;
                need(self.card.is_some(), "a minimum cardinality (c)")?;
                need(self.k.is_some_and(|k| k >= 2), "a pattern count k >= 2")
            }
        }
    }
}

impl fmt::Display for QuerySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(ub) = self.ub {
            write!(f, " ub={ub}")?;
        }
        if let Some(c) = self.card {
            write!(f, " c={c}")?;
        }
        if self.kind == QueryKind::Q3 {
            let mode = match self.mode {
                Q3Mode::Disjoint => "disjoint",
                Q3Mode::Distinct => "distinct",
            };
            write!(f, " k={} mode={mode}", self.k.unwrap_or(0))?;
            if self.mode == Q3Mode::Disjoint && !self.symmetry_breaking {
                f.write_str(" no-symbreak")?;
            }
        }
        Ok(())
    }
}

/// Posts the propagators of a query on a fresh model.
pub fn build_model<'a>(
    ds: &'a TransactionDataset,
    profile: &'a MisProfile,
    spec: &QuerySpec,
) -> Result<Model<'a>> {
    build_model_with_offset(ds, profile, spec, 0)
}

/// [`build_model`] with a deliberately shifted `FreqRare` threshold, for
/// checking that verification catches a wrong propagator.
#[doc(hidden)]
pub fn build_model_with_offset<'a>(
    ds: &'a TransactionDataset,
    profile: &'a MisProfile,
    spec: &QuerySpec,
    threshold_offset: u64,
) -> Result<Model<'a>> {
    spec.validate()?;
    if profile.len() != ds.n() {
        return Err(MiningError::InvalidArgument(format!(
            "profile has {} supports for {} items",
            profile.len(),
            ds.n()
        )));
    }
    let blocks = spec.blocks();
    let mut model = Model::new(ds, profile, blocks).with_heuristic(spec.heuristic);
    for b in 0..blocks {
        model.post(Box::new(
            FreqRare::new(b).with_threshold_offset(threshold_offset),
        ));
        if let Some(ub) = spec.ub {
            model.post(Box::new(DistanceMis::new(b, ub)));
        }
        if let (Some(c), QueryKind::Q2 | QueryKind::Q3) = (spec.card, spec.kind) {
            model.post(Box::new(MinCardinality::new(b, c)));
        }
    }
    if spec.kind == QueryKind::Q3 {
        if spec.mode == Q3Mode::Disjoint {
            for p in 0..blocks {
                for q in p + 1..blocks {
                    model.post(Box::new(Disjoint::new(p, q)));
                }
            }
        }
        if spec.mode == Q3Mode::Distinct || spec.symmetry_breaking {
            for b in 1..blocks {
                model.post(Box::new(LexLess::new(b - 1, b, true)));
            }
        }
    }
    Ok(model)
}

/// Builds the query model and collects all of its solutions.
pub fn solve_query(
    ds: &TransactionDataset,
    profile: &MisProfile,
    spec: &QuerySpec,
) -> Result<(Vec<Solution>, SearchStats)> {
    let model = build_model(ds, profile, spec)?;
    Ok(solve_all(&model))
}
