use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::run::CliError;
use crate::dataset::{CsvSchema, SourceSet, DEFAULT_VARIANCE_FLOOR};
use crate::evaluation::SweepSchedule;
use crate::models::{EmlmConfig, ModelId, ModelSpec, RidgeConfig, SvmConfig};
use crate::selection::{ProtocolConfig, DEFAULT_SIGNIFICANCE};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    /// Permutation-test selection only.
    Select,
    Loso,
    Holdout,
    Sweep,
    /// Selection, LOSO, holdout (when a test set is given) and the sweep.
    Full,
}

impl std::str::FromStr for RunMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "select" => Ok(RunMode::Select),
            "loso" => Ok(RunMode::Loso),
            "holdout" => Ok(RunMode::Holdout),
            "sweep" => Ok(RunMode::Sweep),
            "full" => Ok(RunMode::Full),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

/// One feature CSV, optionally tagged with its openSMILE feature set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputFile {
    Path(PathBuf),
    Tagged { path: PathBuf, source_set: SourceSet },
}

impl InputFile {
    pub fn path(&self) -> &Path {
        match self {
            InputFile::Path(p) | InputFile::Tagged { path: p, .. } => p,
        }
    }

    pub fn source_set(&self) -> Option<SourceSet> {
        match self {
            InputFile::Path(_) => None,
            InputFile::Tagged { source_set, .. } => Some(*source_set),
        }
    }

    fn resolve(&mut self, base: &Path) {
        let p = match self {
            InputFile::Path(p) | InputFile::Tagged { path: p, .. } => p,
        };
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
}

/// A single CSV, or several feature sets of the same subjects to be fused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputFiles {
    One(InputFile),
    Many(Vec<InputFile>),
}

impl InputFiles {
    pub fn files(&self) -> Vec<&InputFile> {
        match self {
            InputFiles::One(f) => vec![f],
            InputFiles::Many(v) => v.iter().collect(),
        }
    }

    fn files_mut(&mut self) -> Vec<&mut InputFile> {
        match self {
            InputFiles::One(f) => vec![f],
            InputFiles::Many(v) => v.iter_mut().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub train: InputFiles,
    #[serde(default)]
    pub test: Option<InputFiles>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSettings {
    /// Choose λ / C by stratified 5-fold grid search; otherwise use `value`.
    pub search: bool,
    pub value: Option<Real>,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self { search: true, value: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub dense_until: usize,
    pub step: usize,
    pub k_max: usize,
    pub regrid_per_k: bool,
}

impl Default for SweepSettings {
    fn default() -> Self {
        let s = SweepSchedule::default();
        Self {
            dense_until: s.dense_until,
            step: s.step,
            k_max: s.k_max,
            regrid_per_k: true,
        }
    }
}

impl SweepSettings {
    pub fn schedule(&self) -> SweepSchedule {
        SweepSchedule {
            dense_until: self.dense_until,
            step: self.step,
            k_max: self.k_max,
        }
    }
}

/// Feature subset scored by the loso/holdout modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EvalFeatures {
    /// `"selected"` (the Wilcoxon-cut set) or `"all"`.
    Named(String),
    /// The top-k of the importance ranking.
    TopK(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationSettings {
    pub features: EvalFeatures,
    /// Re-rank inside every LOSO fold (expensive).
    pub nested: bool,
}

impl Default for EvaluationSettings {
    fn default() -> Self {
        Self {
            features: EvalFeatures::Named("selected".into()),
            nested: false,
        }
    }
}

/// Per-family training settings; λ and C are overwritten by the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSettings {
    pub ridge: RidgeConfig<Real>,
    pub emlm: EmlmConfig<Real>,
    pub svm: SvmConfig<Real>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: RunMode,
    pub model: ModelId,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_significance")]
    pub significance: f64,
    #[serde(default = "default_variance_floor")]
    pub variance_floor: f64,
    pub paths: Paths,
    #[serde(default)]
    pub schema: CsvSchema,
    #[serde(default)]
    pub grid: GridSettings,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub sweep: SweepSettings,
    #[serde(default)]
    pub evaluation: EvaluationSettings,
    #[serde(default)]
    pub models: ModelSettings,
}

fn default_significance() -> f64 {
    DEFAULT_SIGNIFICANCE
}

fn default_variance_floor() -> f64 {
    DEFAULT_VARIANCE_FLOOR
}

impl RunConfig {
    /// Parses a TOML config; relative paths resolve against the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        for f in self.paths.train.files_mut() {
            f.resolve(base);
        }
        if let Some(test) = &mut self.paths.test {
            for f in test.files_mut() {
                f.resolve(base);
            }
        }
        if self.paths.output_dir.is_relative() {
            self.paths.output_dir = base.join(&self.paths.output_dir);
        }
    }

    /// Checks everything that can be checked without reading the data.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(CliError::config(format!(
                "significance must lie in (0, 1), got {}",
                self.significance
            )));
        }
        if !(self.variance_floor >= 0.0) {
            return Err(CliError::config("variance_floor must be >= 0"));
        }
        if self.protocol.repeats == 0 || self.protocol.folds < 2 {
            return Err(CliError::config("protocol needs repeats >= 1 and folds >= 2"));
        }
        let mut inputs = self.paths.train.files();
        if let Some(t) = &self.paths.test {
            inputs.extend(t.files());
        }
        if self.paths.train.files().is_empty() {
            return Err(CliError::config("no training csv given"));
        }
        for f in inputs {
            if !f.path().is_file() {
                return Err(CliError::config(format!("input file {} does not exist", f.path().display())));
            }
        }
        if self.mode == RunMode::Holdout && self.paths.test.is_none() {
            return Err(CliError::config("mode = \"holdout\" needs paths.test"));
        }
        if let EvalFeatures::Named(n) = &self.evaluation.features {
            if n != "selected" && n != "all" {
                return Err(CliError::config(format!(
                    "evaluation.features must be \"selected\", \"all\" or an integer, got {n:?}"
                )));
            }
        }
        if let EvalFeatures::TopK(0) = self.evaluation.features {
            return Err(CliError::config("evaluation.features = 0 selects nothing"));
        }
        if self.evaluation.nested && !matches!(self.evaluation.features, EvalFeatures::TopK(_)) {
            return Err(CliError::config("nested evaluation needs evaluation.features = <k>"));
        }
        if self.model.has_hyperparam() && !self.grid.search {
            match self.grid.value {
                Some(v) if v > 0.0 => {}
                _ => return Err(CliError::config("grid.search = false needs a positive grid.value")),
            }
        }
        let out = &self.paths.output_dir;
        if out.exists() && !out.is_dir() {
            return Err(CliError::config(format!("output_dir {} is not a directory", out.display())));
        }
        if !out.exists() {
            let parent = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            if !parent.is_dir() {
                return Err(CliError::config(format!(
                    "parent of output_dir {} does not exist",
                    out.display()
                )));
            }
        }
        Ok(())
    }

    /// Model specification before any grid search.
    pub fn base_spec(&self) -> ModelSpec<Real> {
        match self.model {
            ModelId::Ridge => ModelSpec::Ridge(self.models.ridge.clone()),
            ModelId::Emlm => ModelSpec::Emlm(self.models.emlm),
            ModelId::Svm => ModelSpec::Svm(self.models.svm.clone()),
        }
    }
}
