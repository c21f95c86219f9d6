use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::accuracy_of;
use crate::dataset::{apply_minmax, fit_minmax, LabeledDataset};
use crate::error::{Error, Result};
use crate::folds::stratified_kfold;
use crate::models::{ModelId, ModelSpec};
use crate::scalar::Scalar;

pub const GRID_FOLDS: usize = 5;

/// Scores closer than this are treated as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// 13 half-decade values 10⁻³, 10⁻²·⁵, …, 10³.
pub fn make_grid<T: Scalar>() -> Vec<T> {
    (0..13)
        .map(|i| {
            let half_decades = i as i32 - 6;
            let decade = half_decades.div_euclid(2);
            let base = if decade >= 0 {
                10f64.powi(decade)
            } else {
                1.0 / 10f64.powi(-decade)
            };
            T::lit(if half_decades % 2 == 0 { base } else { base * 10f64.sqrt() })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GridSearchResult<T: Scalar> {
    pub model_id: ModelId,
    pub grid: Vec<T>,
    /// Mean validation accuracy over the folds, per grid value.
    pub cv_scores: Vec<f64>,
    pub chosen: T,
    pub seed: u64,
}

/// Stratified k-fold choice of λ (Ridge) or C (SVM) over [`make_grid`].
///
/// Ties go to the stronger regularization: the larger λ, the smaller C.
pub fn grid_search<T: Scalar>(
    train: &LabeledDataset<T>,
    spec: &ModelSpec<T>,
    seed: u64,
) -> Result<GridSearchResult<T>> {
    let model_id = spec.id();
    if !model_id.has_hyperparam() {
        return Err(Error::InvalidParameter(format!("{model_id} has no searched hyperparameter")));
    }
    let folds = stratified_kfold(train.labels(), GRID_FOLDS, seed)?;
    let prepared = folds
        .iter()
        .map(|f| {
            let tr = train.select_rows(&f.train);
            let params = fit_minmax(&tr)?;
            let te = train.select_rows(&f.test);
            Ok((apply_minmax(&tr, &params)?, apply_minmax(&te, &params)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let grid = make_grid::<T>();
    let cv_scores = grid
        .par_iter()
        .map(|&value| {
            let candidate = spec.with_hyperparam(value);
            let mut total = 0.0;
            for (f, (tr, te)) in prepared.iter().enumerate() {
                let model = candidate
                    .fit(tr.x(), tr.labels())
                    .map_err(|e| e.with_context(format!("grid value {value}, fold {f}")))?;
                total += accuracy_of(&model.predict(te.x())?, te.labels());
            }
            Ok(total / prepared.len() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;

    let best = cv_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied = |i: &usize| cv_scores[*i] >= best - TIE_TOLERANCE;
    let chosen_idx = match model_id {
        ModelId::Ridge => (0..grid.len()).rev().find(tied),
        _ => (0..grid.len()).find(tied),
    }
    .expect("non-empty grid");
    Ok(GridSearchResult {
        model_id,
        chosen: grid[chosen_idx],
        grid,
        cv_scores,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = make_grid::<f64>();
        assert_eq!(g.len(), 13);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[6], 1.0);
        assert_eq!(g[12], 1e3);
        for w in g.windows(2) {
            assert!((w[1] / w[0] - 10f64.sqrt()).abs() < 1e-12);
        }
    }
}
