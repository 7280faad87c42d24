//! Constraint-based frequent itemset mining under multiple minimum item
//! supports (MIS).
//!
//! An itemset `P` is frequent when `freq(P) >= min_{i in P} s_i`, where each
//! item carries its own absolute threshold `s_i`. The condition is not
//! anti-monotone, so classic Apriori-style pruning does not apply. This crate
//! enumerates such itemsets with a small trail-based constraint solver:
//!
//! * [`dataset`] holds the transaction matrix as vertical bit-vector covers
//!   and generates MIS profiles.
//! * [`engine`] is the depth-first search over Boolean item variables.
//! * [`propagators`] contains the `FreqRare` global constraint and the user
//!   constraints (MIS distance, cardinality, disjointness, lex ordering).
//! * [`queries`] composes those into the query models Q0 to Q3.
//! * [`oracle`] is an independent brute-force enumerator used for checking.
//!
//! ```
//! use misminer::{parse_fimi, MisProfile, QuerySpec, solve_query};
//!
//! let ds = parse_fimi("1 2 4\n1 3 4\n1 2 3 4\n2 3\n1 2 3\n".as_bytes()).unwrap();
//! let mis = MisProfile::from_labels(&ds, &[(1, 4), (2, 3), (3, 3), (4, 1)]).unwrap();
//! let (solutions, stats) = solve_query(&ds, &mis, &QuerySpec::q0()).unwrap();
//! assert_eq!(solutions.len(), 14);
//! assert_eq!(stats.fails, 0);
//! ```

pub mod dataset;
pub mod engine;
mod error;
pub mod oracle;
pub mod propagators;
pub mod queries;
pub mod scaling;
pub mod synth;

pub use dataset::{
    assign_mis, parse_fimi, read_mis, serialize_fimi, write_mis, DatasetStats, MisMin, MisProfile,
    Rounding, TidSet, TransactionDataset,
};
pub use engine::{
    count, propagate_fixpoint, search, select_variable_minmis, solve_all, Assignment, Domain,
    Heuristic, Model, SearchConfig, SearchState, SearchStats, Solution,
};
pub use error::{MiningError, Result};
pub use propagators::{
    Disjoint, DistanceMis, FreqRare, LexLess, MinCardinality, PropagationResult, Propagator,
};
pub use queries::{build_model, solve_query, Q3Mode, QueryKind, QuerySpec};
