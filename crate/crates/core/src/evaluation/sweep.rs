use std::io::Write;

use serde::{Deserialize, Serialize};

use super::grid::grid_search;
use super::loso::{holdout_eval, loso, EvalReport, RankingScope};
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::models::{ModelId, ModelSpec};
use crate::scalar::Scalar;
use crate::selection::{ranking, ImportanceLedger, SCHEMA_VERSION};

/// Feature counts 1..=dense_until, then every `step` up to `k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSchedule {
    pub dense_until: usize,
    pub step: usize,
    pub k_max: usize,
}

impl Default for SweepSchedule {
    fn default() -> Self {
        Self {
            dense_until: 200,
            step: 25,
            k_max: 2500,
        }
    }
}

impl SweepSchedule {
    /// The feature counts to evaluate, clipped to `n_features`.
    pub fn counts(&self, n_features: usize) -> Vec<usize> {
        let top = self.k_max.min(n_features);
        let mut ks: Vec<usize> = (1..=self.dense_until.min(top)).collect();
        if self.step > 0 {
            let mut k = self.dense_until + self.step;
            while k <= top {
                ks.push(k);
                k += self.step;
            }
        }
        ks
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub schedule: SweepSchedule,
    /// Re-run the regularization grid search at every feature count.
    pub regrid_per_k: bool,
    pub grid_seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            schedule: SweepSchedule::default(),
            regrid_per_k: true,
            grid_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub k: usize,
    pub hyperparam: Option<f64>,
    pub loso_accuracy: f64,
    pub holdout_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub schema_version: u32,
    pub model_id: ModelId,
    pub ranking_scope: RankingScope,
    pub points: Vec<SweepPoint>,
    /// (k, accuracy) of the best LOSO point; earliest k on ties.
    pub best_loso: (usize, f64),
    pub best_holdout: Option<(usize, f64)>,
}

impl SweepCurve {
    pub fn point(&self, k: usize) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.k == k)
    }

    /// `k,loso_acc,holdout_acc` rows; the last column is empty without a test set.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let io = |e: csv::Error| Error::Io {
            path: "<sweep csv>".into(),
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["k", "loso_acc", "holdout_acc"]).map_err(io)?;
        for p in &self.points {
            w.write_record([
                p.k.to_string(),
                p.loso_accuracy.to_string(),
                p.holdout_accuracy.map(|v| v.to_string()).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<sweep csv>".into(),
            message: e.to_string(),
        })
    }
}

fn argmax(values: impl Iterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    values.fold(None, |best, (k, v)| match best {
        Some((_, bv)) if bv >= v => best,
        _ => Some((k, v)),
    })
}

/// Accuracy of the top-k features of `ledger`'s ranking for every k in the
/// schedule: LOSO on `train`, and holdout on `test` when given.
pub fn sweep_feature_counts<T: Scalar>(
    train: &LabeledDataset<T>,
    test: Option<&LabeledDataset<T>>,
    spec: &ModelSpec<T>,
    ledger: &ImportanceLedger<T>,
    opts: &SweepOptions,
) -> Result<SweepCurve> {
    sweep_feature_counts_inspect(train, test, spec, ledger, opts, |_| {})
}

/// [`sweep_feature_counts`], handing every per-k report (LOSO, then holdout)
/// to `inspect` before it is reduced to an accuracy.
pub fn sweep_feature_counts_inspect<T: Scalar>(
    train: &LabeledDataset<T>,
    test: Option<&LabeledDataset<T>>,
    spec: &ModelSpec<T>,
    ledger: &ImportanceLedger<T>,
    opts: &SweepOptions,
    mut inspect: impl FnMut(&EvalReport),
) -> Result<SweepCurve> {
    if ledger.n_features() != train.n_features() {
        return Err(Error::DimensionMismatch {
            what: "ledger feature count",
            expected: train.n_features(),
            got: ledger.n_features(),
        });
    }
    let order = ranking(ledger);
    let ks = opts.schedule.counts(train.n_features());
    let mut points = Vec::with_capacity(ks.len());
    for k in ks {
        let subset = &order[..k];
        let ctx = |e: Error| e.with_context(format!("sweep at k = {k}"));
        let tuned = if opts.regrid_per_k && spec.id().has_hyperparam() {
            let chosen = grid_search(&train.select_features(subset), spec, opts.grid_seed).map_err(ctx)?;
            spec.with_hyperparam(chosen.chosen)
        } else {
            spec.clone()
        };
        let l = loso(train, &tuned, subset, RankingScope::InPool).map_err(ctx)?;
        inspect(&l);
        let h = match test {
            Some(t) => {
                let r = holdout_eval(train, t, &tuned, subset, RankingScope::InPool).map_err(ctx)?;
                inspect(&r);
                Some(r.accuracy)
            }
            None => None,
        };
        points.push(SweepPoint {
            k,
            hyperparam: tuned.hyperparam().map(Scalar::as_f64),
            loso_accuracy: l.accuracy,
            holdout_accuracy: h,
        });
    }
    let best_loso = argmax(points.iter().map(|p| (p.k, p.loso_accuracy)))
        .ok_or_else(|| Error::InvalidParameter("empty sweep schedule".into()))?;
    let best_holdout = argmax(points.iter().filter_map(|p| p.holdout_accuracy.map(|a| (p.k, a))));
    Ok(SweepCurve {
        schema_version: SCHEMA_VERSION,
        model_id: spec.id(),
        ranking_scope: RankingScope::InPool,
        points,
        best_loso,
        best_holdout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule() {
        let s = SweepSchedule::default();
        let ks = s.counts(6923);
        assert_eq!(ks.len(), 200 + 92);
        assert_eq!(ks[199], 200);
        assert_eq!(ks[200], 225);
        assert_eq!(*ks.last().unwrap(), 2500);
        assert_eq!(s.counts(50), (1..=50).collect::<Vec<_>>());
    }

    #[test]
    fn argmax_prefers_earliest() {
        assert_eq!(argmax([(1, 0.5), (2, 0.9), (3, 0.9)].into_iter()), Some((2, 0.9)));
    }
}
