//! Wilcoxon signed-rank test and seeded label permutation.

mod permute;
mod wilcoxon;

pub use permute::permute_labels;
pub use wilcoxon::{
    average_ranks, median, wilcoxon_signed_rank, SignedRankResult, Sidedness, TestMethod,
    EXACT_MAX_N,
};
