//! Leave-one-subject-out and holdout evaluation, regularization grid search,
//! classification metrics and accuracy-versus-feature-count sweeps.

mod grid;
mod loso;
mod metrics;
mod sweep;

pub use grid::{grid_search, make_grid, GridSearchResult, GRID_FOLDS};
pub use loso::{holdout_eval, loso, loso_nested, EvalProtocol, EvalReport, FoldRecord, RankingScope};
pub use metrics::{accuracy_of, ConfusionMatrix};
pub use sweep::{sweep_feature_counts, sweep_feature_counts_inspect, SweepCurve, SweepOptions, SweepPoint, SweepSchedule};
