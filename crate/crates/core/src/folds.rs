//! Seeded k-fold partitions.

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::rng;

/// One train/validation partition; both index lists are ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn complement(n: usize, test: &mut Vec<usize>) -> Fold {
    test.sort_unstable();
    let mut in_test = vec![false; n];
    for &i in test.iter() {
        in_test[i] = true;
    }
    Fold {
        train: (0..n).filter(|&i| !in_test[i]).collect(),
        test: std::mem::take(test),
    }
}

/// Shuffles `0..n` with `seed` and cuts it into `k` contiguous chunks whose
/// sizes differ by at most one.
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 || k > n {
        return Err(Error::InvalidParameter(format!("cannot split {n} samples into {k} folds")));
    }
    let order = rng::permutation(seed, n);
    let (base, extra) = (n / k, n % k);
    let mut start = 0;
    Ok((0..k)
        .map(|f| {
            let len = base + usize::from(f < extra);
            let mut test = order[start..start + len].to_vec();
            start += len;
            complement(n, &mut test)
        })
        .collect())
}

/// Stratified k folds: each class is shuffled separately and dealt
/// round-robin, so every fold holds ⌊c/k⌋ or ⌈c/k⌉ members of a class of
/// size c. Every class needs at least `k` members.
pub fn stratified_kfold(labels: &[Label], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::InvalidParameter("need at least two folds".into()));
    }
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut offset = 0;
    for (ci, class) in [Label::Control, Label::Ad].into_iter().enumerate() {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::InvalidParameter(format!(
                "stratified {k}-fold split needs at least {k} subjects per class; {class} has {}",
                members.len()
            )));
        }
        rng::shuffle(&mut rng::stream(rng::derive_seed(seed, &[ci as u64])), &mut members);
        for (pos, idx) in members.into_iter().enumerate() {
            buckets[(pos + offset) % k].push(idx);
        }
        // continue dealing where the previous class stopped to balance fold sizes
        offset = (offset + labels.iter().filter(|&&l| l == class).count()) % k;
    }
    Ok(buckets
        .into_iter()
        .map(|mut test| complement(labels.len(), &mut test))
        .collect())
}
