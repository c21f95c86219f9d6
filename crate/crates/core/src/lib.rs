//! Dementia screening from whole-recording acoustic features.
//!
//! The crate ingests openSMILE feature tables exported as CSV, fuses and
//! prunes them, and provides three classifiers that expose feature
//! importances (Ridge regression, the Extreme Minimal Learning Machine and a
//! linear SVM). Importances drive a permutation-test selection protocol with
//! a Wilcoxon signed-rank cutoff, and the selected feature sets are scored by
//! leave-one-subject-out and holdout evaluation.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the `f64` instances used by the pipeline and the CLI.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod folds;
pub mod linalg;
pub mod models;
pub mod rng;
pub mod scalar;
pub mod selection;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use dataset::{FeatureCatalog, Label, LabeledDataset, SourceSet};
pub use evaluation::{ConfusionMatrix, EvalReport, SweepCurve};
pub use models::{ModelId, ModelSpec, TrainedModel};
pub use selection::{ImportanceLedger, SelectionResult};
pub use stats::SignedRankResult;

/// Working precision of the pipeline.
pub type Real = f64;

pub type Dataset = LabeledDataset<Real>;
pub type Normalization = dataset::NormalizationParams<Real>;
pub type Ridge = models::RidgeModel<Real>;
pub type RidgeSettings = models::RidgeConfig<Real>;
pub type Emlm = models::EmlmModel<Real>;
pub type EmlmSettings = models::EmlmConfig<Real>;
pub type Svm = models::SvmModel<Real>;
pub type SvmSettings = models::SvmConfig<Real>;
pub type Model = TrainedModel<Real>;
pub type Spec = ModelSpec<Real>;
pub type Ledger = ImportanceLedger<Real>;
pub type GridSearch = evaluation::GridSearchResult<Real>;
