//! Permutation-test feature selection.
//!
//! Each repeat draws a seeded k-fold split. In every fold the training part
//! is min–max scaled, the model is trained once on the true labels and once
//! on a fresh permutation of them, and both importance vectors are kept.
//! The per-feature medians over the folds form one paired observation per
//! repeat. Features are ranked by their mean true-label median and walked in
//! that order with a two-sided Wilcoxon signed-rank test of true against
//! permuted medians; the walk stops at the first feature that does not
//! reject.

mod protocol;
mod ranking;

pub use protocol::{run_protocol, ImportanceLedger, ProtocolConfig, RepeatSeeds};
pub use ranking::{rank_and_cut, ranking, select_top_k, SelectionResult, DEFAULT_SIGNIFICANCE};

/// Version tag written into every serialized report.
pub const SCHEMA_VERSION: u32 = 1;
