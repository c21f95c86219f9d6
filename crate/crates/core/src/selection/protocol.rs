use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SCHEMA_VERSION;
use crate::dataset::{apply_minmax, fit_minmax, LabeledDataset};
use crate::error::{Error, Result};
use crate::evaluation::accuracy_of;
use crate::folds::kfold;
use crate::models::{ModelId, ModelSpec};
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use crate::stats::{median, permute_labels};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProtocolConfig {
    pub repeats: usize,
    pub folds: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self { repeats: 100, folds: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepeatSeeds {
    pub split: u64,
    /// One label-permutation seed per fold.
    pub permutations: Vec<u64>,
}

impl RepeatSeeds {
    fn derive(master_seed: u64, repeat: usize, folds: usize) -> Self {
        let r = repeat as u64;
        Self {
            split: derive_seed(master_seed, &[r, 0]),
            permutations: (0..folds as u64).map(|f| derive_seed(master_seed, &[r, 1, f])).collect(),
        }
    }
}

/// Paired true-label and permuted-label median importances per feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ImportanceLedger<T: Scalar> {
    pub schema_version: u32,
    pub model_id: ModelId,
    pub model: ModelSpec<T>,
    pub master_seed: u64,
    pub repeats: usize,
    pub folds: usize,
    pub feature_names: Vec<String>,
    pub seeds: Vec<RepeatSeeds>,
    /// `[feature][repeat]`.
    pub true_medians: Vec<Vec<T>>,
    /// `[feature][repeat]`.
    pub perm_medians: Vec<Vec<T>>,
    /// Accuracy on each held-out fold, `[repeat][fold]`. Logged only.
    pub validation_accuracy: Vec<Vec<f64>>,
}

impl<T: Scalar> ImportanceLedger<T> {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Mean of the true-label medians per feature.
    pub fn mean_true_importance(&self) -> Vec<T> {
        self.true_medians
            .iter()
            .map(|v| v.iter().copied().sum::<T>() / T::lit(v.len() as f64))
            .collect()
    }

    /// Long-format CSV: `feature,repeat,true_median,perm_median`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let io = |e: csv::Error| Error::Io {
            path: "<ledger csv>".into(),
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["feature", "repeat", "true_median", "perm_median"]).map_err(io)?;
        for (f, name) in self.feature_names.iter().enumerate() {
            for r in 0..self.repeats {
                w.write_record([
                    name.clone(),
                    r.to_string(),
                    self.true_medians[f][r].to_string(),
                    self.perm_medians[f][r].to_string(),
                ])
                .map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::Io {
            path: "<ledger csv>".into(),
            message: e.to_string(),
        })
    }
}

struct RepeatOutcome<T> {
    true_medians: Vec<T>,
    perm_medians: Vec<T>,
    validation_accuracy: Vec<f64>,
}

fn run_repeat<T: Scalar>(
    train: &LabeledDataset<T>,
    spec: &ModelSpec<T>,
    seeds: &RepeatSeeds,
    folds: usize,
) -> Result<RepeatOutcome<T>> {
    let n_features = train.n_features();
    let splits = kfold(train.n_subjects(), folds, seeds.split)?;
    let mut true_imp: Vec<Vec<T>> = Vec::with_capacity(folds);
    let mut perm_imp: Vec<Vec<T>> = Vec::with_capacity(folds);
    let mut validation_accuracy = Vec::with_capacity(folds);
    for (f, split) in splits.iter().enumerate() {
        let ctx = |e: Error| e.with_context(format!("fold {f}"));
        let part = train.select_rows(&split.train);
        let params = fit_minmax(&part).map_err(ctx)?;
        let part = apply_minmax(&part, &params).map_err(ctx)?;

        let model = spec.fit(part.x(), part.labels()).map_err(ctx)?;
        true_imp.push(model.importance(part.x()).map_err(ctx)?);

        let held_out = train.select_rows(&split.test);
        let held_x = params.transform(held_out.x()).map_err(ctx)?;
        let predicted = model.predict(held_x.view()).map_err(ctx)?;
        validation_accuracy.push(accuracy_of(&predicted, held_out.labels()));

        let permuted = permute_labels(part.labels(), seeds.permutations[f]);
        let null_model = spec.fit(part.x(), &permuted).map_err(ctx)?;
        perm_imp.push(null_model.importance(part.x()).map_err(ctx)?);
    }
    let column_medians = |imp: &[Vec<T>]| -> Vec<T> {
        (0..n_features)
            .map(|j| median(&imp.iter().map(|v| v[j]).collect::<Vec<_>>()))
            .collect()
    };
    Ok(RepeatOutcome {
        true_medians: column_medians(&true_imp),
        perm_medians: column_medians(&perm_imp),
        validation_accuracy,
    })
}

/// Runs the repeated cross-validated permutation protocol on raw (unscaled)
/// training data. Repeats run in parallel; every repeat derives its own
/// seeds from `master_seed`, so the ledger does not depend on scheduling.
pub fn run_protocol<T: Scalar>(
    train: &LabeledDataset<T>,
    spec: &ModelSpec<T>,
    master_seed: u64,
    cfg: &ProtocolConfig,
) -> Result<ImportanceLedger<T>> {
    if cfg.repeats == 0 {
        return Err(Error::InvalidParameter("protocol needs at least one repeat".into()));
    }
    let seeds: Vec<RepeatSeeds> = (0..cfg.repeats)
        .map(|r| RepeatSeeds::derive(master_seed, r, cfg.folds))
        .collect();
    let outcomes = seeds
        .par_iter()
        .enumerate()
        .map(|(r, s)| {
            run_repeat(train, spec, s, cfg.folds)
                .map_err(|e| e.with_context(format!("{} protocol repeat {r}", spec.id())))
        })
        .collect::<Result<Vec<_>>>()?;

    let n_features = train.n_features();
    let transpose = |pick: fn(&RepeatOutcome<T>) -> &Vec<T>| -> Vec<Vec<T>> {
        (0..n_features)
            .map(|j| outcomes.iter().map(|o| pick(o)[j]).collect())
            .collect()
    };
    Ok(ImportanceLedger {
        schema_version: SCHEMA_VERSION,
        model_id: spec.id(),
        model: spec.clone(),
        master_seed,
        repeats: cfg.repeats,
        folds: cfg.folds,
        feature_names: train.catalog().names().map(str::to_string).collect(),
        true_medians: transpose(|o| &o.true_medians),
        perm_medians: transpose(|o| &o.perm_medians),
        validation_accuracy: outcomes.iter().map(|o| o.validation_accuracy.clone()).collect(),
        seeds,
    })
}
