use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::ConfusionMatrix;
use crate::dataset::{apply_minmax, fit_minmax, Fingerprint, Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::models::{ModelId, ModelSpec};
use crate::scalar::Scalar;
use crate::selection::{run_protocol, select_top_k, ProtocolConfig, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalProtocol {
    Loso,
    Holdout,
}

/// Where the feature ranking behind `feature_subset` was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingScope {
    /// No ranking involved (subset supplied directly).
    Unranked,
    /// Ranked once on the whole evaluation pool, held-out subjects included.
    InPool,
    /// Re-ranked inside every fold on the training part only.
    Nested,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub held_out: Vec<String>,
    pub predicted: Vec<Label>,
    pub truth: Vec<Label>,
    /// Fingerprint of the subjects the fold's scaling was fitted on.
    pub normalization_fingerprint: Fingerprint,
    /// Per-fold feature subset (nested mode only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub model_id: ModelId,
    pub protocol: EvalProtocol,
    pub ranking_scope: RankingScope,
    pub hyperparam: Option<f64>,
    pub feature_subset: Vec<usize>,
    pub feature_names: Vec<String>,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub f1: f64,
    pub macro_f1: f64,
    pub per_fold: Vec<FoldRecord>,
}

impl EvalReport {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        model_id: ModelId,
        protocol: EvalProtocol,
        ranking_scope: RankingScope,
        hyperparam: Option<f64>,
        feature_subset: Vec<usize>,
        feature_names: Vec<String>,
        per_fold: Vec<FoldRecord>,
    ) -> Self {
        let mut confusion = ConfusionMatrix::default();
        for rec in &per_fold {
            for (&p, &t) in rec.predicted.iter().zip(&rec.truth) {
                confusion.record(p, t);
            }
        }
        Self {
            schema_version: SCHEMA_VERSION,
            model_id,
            protocol,
            ranking_scope,
            hyperparam,
            feature_subset,
            feature_names,
            accuracy: confusion.accuracy(),
            f1: confusion.f1(),
            macro_f1: confusion.macro_f1(),
            confusion,
            per_fold,
        }
    }
}

fn check_subset(n_features: usize, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidParameter("empty feature subset".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&j| j >= n_features) {
        return Err(Error::InvalidParameter(format!(
            "feature index {bad} out of range for {n_features} features"
        )));
    }
    Ok(())
}

fn train_and_predict<T: Scalar>(
    train: &LabeledDataset<T>,
    test: &LabeledDataset<T>,
    spec: &ModelSpec<T>,
) -> Result<(Vec<Label>, Fingerprint)> {
    let params = fit_minmax(train)?;
    let train_n = apply_minmax(train, &params)?;
    let model = spec.fit(train_n.x(), train_n.labels())?;
    let test_x = params.transform(test.x())?;
    Ok((model.predict(test_x.view())?, params.fitted_on))
}

/// Leave-one-subject-out evaluation on the columns `feature_subset`.
pub fn loso<T: Scalar>(
    ds: &LabeledDataset<T>,
    spec: &ModelSpec<T>,
    feature_subset: &[usize],
    ranking_scope: RankingScope,
) -> Result<EvalReport> {
    let n = ds.n_subjects();
    if n < 2 {
        return Err(Error::InvalidParameter("LOSO needs at least two subjects".into()));
    }
    check_subset(ds.n_features(), feature_subset)?;
    let sub = ds.select_features(feature_subset);
    let per_fold = (0..n)
        .into_par_iter()
        .map(|i| {
            let rest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let held = sub.select_rows(&[i]);
            let (predicted, fp) = train_and_predict(&sub.select_rows(&rest), &held, spec)
                .map_err(|e| e.with_context(format!("LOSO fold {i} (subject {})", ds.subjects()[i])))?;
            Ok(FoldRecord {
                held_out: held.subjects().to_vec(),
                predicted,
                truth: held.labels().to_vec(),
                normalization_fingerprint: fp,
                features: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::assemble(
        spec.id(),
        EvalProtocol::Loso,
        ranking_scope,
        spec.hyperparam().map(Scalar::as_f64),
        feature_subset.to_vec(),
        sub.catalog().names().map(str::to_string).collect(),
        per_fold,
    ))
}

/// LOSO where every fold re-runs the selection protocol on its own training
/// subjects and keeps that fold's top `k` features.
pub fn loso_nested<T: Scalar>(
    ds: &LabeledDataset<T>,
    spec: &ModelSpec<T>,
    k: usize,
    protocol: &ProtocolConfig,
    master_seed: u64,
) -> Result<EvalReport> {
    let n = ds.n_subjects();
    if n < 2 {
        return Err(Error::InvalidParameter("LOSO needs at least two subjects".into()));
    }
    let per_fold = (0..n)
        .map(|i| {
            let ctx = |e: Error| e.with_context(format!("nested LOSO fold {i}"));
            let rest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let train = ds.select_rows(&rest);
            let ledger = run_protocol(&train, spec, master_seed, protocol).map_err(ctx)?;
            let top = select_top_k(&ledger, k).map_err(ctx)?;
            let held = ds.select_rows(&[i]).select_features(&top);
            let (predicted, fp) =
                train_and_predict(&train.select_features(&top), &held, spec).map_err(ctx)?;
            Ok(FoldRecord {
                held_out: held.subjects().to_vec(),
                predicted,
                truth: held.labels().to_vec(),
                normalization_fingerprint: fp,
                features: Some(top),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::assemble(
        spec.id(),
        EvalProtocol::Loso,
        RankingScope::Nested,
        spec.hyperparam().map(Scalar::as_f64),
        Vec::new(),
        Vec::new(),
        per_fold,
    ))
}

/// Trains on all of `train` and scores `test` with the training scaling.
pub fn holdout_eval<T: Scalar>(
    train: &LabeledDataset<T>,
    test: &LabeledDataset<T>,
    spec: &ModelSpec<T>,
    feature_subset: &[usize],
    ranking_scope: RankingScope,
) -> Result<EvalReport> {
    if train.catalog().names().ne(test.catalog().names()) {
        return Err(Error::InvalidDataset("train and test feature catalogs differ".into()));
    }
    check_subset(train.n_features(), feature_subset)?;
    let tr = train.select_features(feature_subset);
    let te = test.select_features(feature_subset);
    let (predicted, fp) =
        train_and_predict(&tr, &te, spec).map_err(|e| e.with_context("holdout evaluation"))?;
    Ok(EvalReport::assemble(
        spec.id(),
        EvalProtocol::Holdout,
        ranking_scope,
        spec.hyperparam().map(Scalar::as_f64),
        feature_subset.to_vec(),
        tr.catalog().names().map(str::to_string).collect(),
        vec![FoldRecord {
            held_out: te.subjects().to_vec(),
            predicted,
            truth: te.labels().to_vec(),
            normalization_fingerprint: fp,
            features: None,
        }],
    ))
}
