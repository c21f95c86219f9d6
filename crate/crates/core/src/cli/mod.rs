//! Command-line front end: a declarative run configuration, the pipeline
//! that executes it, and the synthetic data generator used for testing.

mod config;
mod run;
mod synthetic;

pub use config::{
    EvalFeatures, EvaluationSettings, GridSettings, InputFile, InputFiles, ModelSettings, Paths,
    RunConfig, RunMode, SweepSettings,
};
pub use run::{run_pipeline, write_error_record, ArtifactSet, CliError, ErrorKind, GridReport, RunOptions};
pub use synthetic::{generate_synthetic, SyntheticSpec};
