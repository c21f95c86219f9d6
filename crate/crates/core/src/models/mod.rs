//! The three classifiers and a uniform fit / predict / importance surface.

pub mod emlm;
pub mod ridge;
pub mod svm;

use std::fmt;
use std::str::FromStr;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use emlm::{distance_matrix, emlm_fit, EmlmConfig, EmlmModel};
pub use ridge::{ridge_fit, RidgeConfig, RidgeModel, RidgePrediction, RidgeProblem, RidgeSolver};
pub use svm::{svm_fit, svm_objective, svm_subgradient, SvmConfig, SvmModel, SvmSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelId {
    Ridge,
    Emlm,
    Svm,
}

impl ModelId {
    pub const ALL: [ModelId; 3] = [ModelId::Ridge, ModelId::Emlm, ModelId::Svm];

    /// Whether the model has a regularization parameter chosen by grid search.
    pub fn has_hyperparam(self) -> bool {
        !matches!(self, ModelId::Emlm)
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelId::Ridge => "ridge",
            ModelId::Emlm => "emlm",
            ModelId::Svm => "svm",
        })
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ridge" => Ok(ModelId::Ridge),
            "emlm" => Ok(ModelId::Emlm),
            "svm" | "l-svm" | "lsvm" => Ok(ModelId::Svm),
            other => Err(Error::InvalidParameter(format!("unknown model {other:?}"))),
        }
    }
}

/// A model family together with its training configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "model", rename_all = "lowercase")]
pub enum ModelSpec<T: Scalar> {
    Ridge(RidgeConfig<T>),
    Emlm(EmlmConfig<T>),
    Svm(SvmConfig<T>),
}

impl<T: Scalar> ModelSpec<T> {
    /// Default configuration of a family.
    pub fn default_for(id: ModelId) -> Self {
        match id {
            ModelId::Ridge => ModelSpec::Ridge(RidgeConfig::default()),
            ModelId::Emlm => ModelSpec::Emlm(EmlmConfig::default()),
            ModelId::Svm => ModelSpec::Svm(SvmConfig::default()),
        }
    }

    pub fn id(&self) -> ModelId {
        match self {
            ModelSpec::Ridge(_) => ModelId::Ridge,
            ModelSpec::Emlm(_) => ModelId::Emlm,
            ModelSpec::Svm(_) => ModelId::Svm,
        }
    }

    /// λ for Ridge, C for SVM.
    pub fn hyperparam(&self) -> Option<T> {
        match self {
            ModelSpec::Ridge(c) => Some(c.lambda),
            ModelSpec::Emlm(_) => None,
            ModelSpec::Svm(c) => Some(c.c),
        }
    }

    pub fn with_hyperparam(&self, value: T) -> Self {
        match self {
            ModelSpec::Ridge(c) => ModelSpec::Ridge(RidgeConfig { lambda: value, ..c.clone() }),
            ModelSpec::Emlm(c) => ModelSpec::Emlm(*c),
            ModelSpec::Svm(c) => ModelSpec::Svm(SvmConfig { c: value, ..c.clone() }),
        }
    }

    pub fn fit(&self, x: ArrayView2<'_, T>, labels: &[Label]) -> Result<TrainedModel<T>> {
        let signed = || labels.iter().map(|l| l.signed::<T>()).collect::<Vec<T>>();
        Ok(match self {
            ModelSpec::Ridge(cfg) => TrainedModel::Ridge(ridge_fit(x, &signed(), cfg)?),
            ModelSpec::Emlm(cfg) => TrainedModel::Emlm(emlm_fit(x, labels, cfg)?),
            ModelSpec::Svm(cfg) => TrainedModel::Svm(svm_fit(x, &signed(), cfg)?),
        })
    }
}

/// A fitted model of any family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "model", rename_all = "lowercase")]
pub enum TrainedModel<T: Scalar> {
    Ridge(RidgeModel<T>),
    Emlm(EmlmModel<T>),
    Svm(SvmModel<T>),
}

impl<T: Scalar> TrainedModel<T> {
    pub fn id(&self) -> ModelId {
        match self {
            TrainedModel::Ridge(_) => ModelId::Ridge,
            TrainedModel::Emlm(_) => ModelId::Emlm,
            TrainedModel::Svm(_) => ModelId::Svm,
        }
    }

    pub fn predict(&self, x: ArrayView2<'_, T>) -> Result<Vec<Label>> {
        match self {
            TrainedModel::Ridge(m) => Ok(m.predict(x)?.labels),
            TrainedModel::Emlm(m) => m.predict(x),
            TrainedModel::Svm(m) => m.predict(x),
        }
    }

    /// Per-feature importances. `x_train` is only read by EMLM, whose
    /// sensitivities are averaged over the samples it was trained on.
    pub fn importance(&self, x_train: ArrayView2<'_, T>) -> Result<Vec<T>> {
        match self {
            TrainedModel::Ridge(m) => Ok(m.importance()),
            TrainedModel::Emlm(m) => m.importance(x_train),
            TrainedModel::Svm(m) => Ok(m.importance()),
        }
    }
}
