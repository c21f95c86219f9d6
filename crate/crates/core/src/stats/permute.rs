use crate::rng;

/// A uniformly random reordering of `y`, determined by `seed` alone.
pub fn permute_labels<L: Clone>(y: &[L], seed: u64) -> Vec<L> {
    rng::permutation(seed, y.len())
        .into_iter()
        .map(|i| y[i].clone())
        .collect()
}
