use serde::{Deserialize, Serialize};

use super::{ImportanceLedger, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::models::ModelId;
use crate::scalar::Scalar;
use crate::stats::{wilcoxon_signed_rank, Sidedness};

pub const DEFAULT_SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub schema_version: u32,
    pub model_id: ModelId,
    pub significance: f64,
    /// Feature indices, most important first.
    pub ranked_features: Vec<usize>,
    pub ranked_names: Vec<String>,
    /// Mean true-label median importance, in ranked order.
    pub mean_importance: Vec<f64>,
    /// Two-sided signed-rank p-value, in ranked order.
    pub p_values: Vec<f64>,
    /// Rank of the first feature that does not reject; the number selected.
    pub cutoff_index: usize,
    /// `ranked_features[..cutoff_index]`.
    pub selected: Vec<usize>,
}

/// Feature indices by descending mean true-label importance, ties in
/// catalog order.
pub fn ranking<T: Scalar>(ledger: &ImportanceLedger<T>) -> Vec<usize> {
    let means = ledger.mean_true_importance();
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&a, &b| {
        means[b]
            .partial_cmp(&means[a])
            .expect("finite importances")
            .then(a.cmp(&b))
    });
    order
}

pub fn rank_and_cut<T: Scalar>(ledger: &ImportanceLedger<T>, significance: f64) -> Result<SelectionResult> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "significance must lie in (0, 1), got {significance}"
        )));
    }
    let ranked = ranking(ledger);
    let means = ledger.mean_true_importance();
    let p_values = ranked
        .iter()
        .map(|&f| {
            wilcoxon_signed_rank(&ledger.true_medians[f], &ledger.perm_medians[f], Sidedness::TwoSided)
                .map(|r| r.p_value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let cutoff_index = p_values
        .iter()
        .position(|&p| p >= significance)
        .unwrap_or(ranked.len());
    Ok(SelectionResult {
        schema_version: SCHEMA_VERSION,
        model_id: ledger.model_id,
        significance,
        ranked_names: ranked.iter().map(|&f| ledger.feature_names[f].clone()).collect(),
        mean_importance: ranked.iter().map(|&f| means[f].as_f64()).collect(),
        p_values,
        cutoff_index,
        selected: ranked[..cutoff_index].to_vec(),
        ranked_features: ranked,
    })
}

/// The first `k` features of the importance ranking.
pub fn select_top_k<T: Scalar>(ledger: &ImportanceLedger<T>, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > ledger.n_features() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} outside 1..={}",
            ledger.n_features()
        )));
    }
    let mut r = ranking(ledger);
    r.truncate(k);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModelSpec, RidgeConfig};
    use crate::selection::RepeatSeeds;

    fn ledger(true_medians: Vec<Vec<f64>>, perm_medians: Vec<Vec<f64>>) -> ImportanceLedger<f64> {
        let n = true_medians.len();
        let repeats = true_medians[0].len();
        ImportanceLedger {
            schema_version: SCHEMA_VERSION,
            model_id: ModelId::Ridge,
            model: ModelSpec::Ridge(RidgeConfig::default()),
            master_seed: 0,
            repeats,
            folds: 5,
            feature_names: (0..n).map(|i| format!("f{i}")).collect(),
            seeds: vec![RepeatSeeds { split: 0, permutations: vec![] }; repeats],
            true_medians,
            perm_medians,
            validation_accuracy: vec![],
        }
    }

    #[test]
    fn maximal_separation_is_selected() {
        let l = ledger(
            vec![vec![1.0; 100], (0..100).map(|i| (i % 7) as f64 * 0.01).collect()],
            vec![vec![0.0; 100], (0..100).map(|i| (i % 5) as f64 * 0.01).collect()],
        );
        let s = rank_and_cut(&l, DEFAULT_SIGNIFICANCE).unwrap();
        assert_eq!(s.ranked_features[0], 0);
        assert!(s.p_values[0] < 1e-15);
        assert!(s.cutoff_index >= 1);
        assert_eq!(s.selected[0], 0);
    }

    #[test]
    fn walk_stops_at_first_failure() {
        // Feature 1 ranks second and is indistinguishable from its null;
        // feature 2 ranks third but would reject on its own.
        let l = ledger(
            vec![vec![3.0; 100], vec![2.0; 100], vec![1.0; 100]],
            vec![vec![0.0; 100], vec![2.0; 100], vec![0.0; 100]],
        );
        let s = rank_and_cut(&l, DEFAULT_SIGNIFICANCE).unwrap();
        assert_eq!(s.ranked_features, vec![0, 1, 2]);
        assert_eq!(s.cutoff_index, 1);
        assert_eq!(s.selected, vec![0]);
        assert!(s.p_values[2] < DEFAULT_SIGNIFICANCE);
    }

    #[test]
    fn ties_keep_catalog_order_and_top_k_nests() {
        let l = ledger(
            vec![vec![1.0; 4], vec![2.0; 4], vec![1.0; 4], vec![0.5; 4]],
            vec![vec![0.0; 4]; 4],
        );
        assert_eq!(ranking(&l), vec![1, 0, 2, 3]);
        assert_eq!(select_top_k(&l, 4).unwrap().len(), 4);
        for k1 in 1..=4 {
            for k2 in k1..=4 {
                let a = select_top_k(&l, k1).unwrap();
                let b = select_top_k(&l, k2).unwrap();
                assert_eq!(&b[..k1], &a[..]);
            }
        }
        assert!(select_top_k(&l, 0).is_err());
        assert!(select_top_k(&l, 5).is_err());
    }

    #[test]
    fn rejects_bad_significance() {
        let l = ledger(vec![vec![1.0; 3]], vec![vec![0.0; 3]]);
        assert!(rank_and_cut(&l, 0.0).is_err());
        assert!(rank_and_cut(&l, 1.0).is_err());
    }
}
