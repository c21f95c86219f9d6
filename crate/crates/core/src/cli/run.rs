use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{EvalFeatures, InputFiles, RunConfig, RunMode};
use crate::dataset::{fuse, load_csv, prune, CsvSchema, PruneReport};
use crate::error::Error;
use crate::evaluation::{
    grid_search, holdout_eval, loso, loso_nested, sweep_feature_counts, EvalReport, RankingScope,
    SweepOptions,
};
use crate::rng::derive_seed;
use crate::selection::{rank_and_cut, run_protocol, select_top_k, SelectionResult, SCHEMA_VERSION};
use crate::{Dataset, GridSearch, Ledger, Spec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Config,
    Data,
    Runtime,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Data => 3,
            ErrorKind::Runtime => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Config, message: message.into() }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Runtime, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }

    /// Single-line JSON record for machine consumers.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "error": self.kind,
            "exit_code": self.exit_code(),
            "message": self.message,
        })
        .to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = if e.is_data_error() { ErrorKind::Data } else { ErrorKind::Runtime };
        Self { kind, message: e.to_string() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} error: {}", self.kind_str(), self.message)
    }
}

impl CliError {
    fn kind_str(&self) -> &'static str {
        match self.kind {
            ErrorKind::Config => "config",
            ErrorKind::Data => "data",
            ErrorKind::Runtime => "runtime",
        }
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub mode: Option<RunMode>,
    pub seed: Option<u64>,
}

/// Files written by a run, in write order.
#[derive(Debug, Clone, Default)]
pub struct ArtifactSet {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub schema_version: u32,
    /// Chosen on all pruned features; used by the selection protocol.
    pub protocol: Option<GridSearch>,
    /// Chosen on the evaluated feature subset.
    pub evaluation: Option<GridSearch>,
}

#[derive(Debug, Serialize)]
struct Meta {
    schema_version: u32,
    crate_version: &'static str,
    rustc_target: &'static str,
    threads: usize,
    mode: RunMode,
    stages: Vec<(String, f64)>,
    wall_seconds: f64,
}

struct Writer {
    artifacts: ArtifactSet,
}

impl Writer {
    fn path(&self, name: &str) -> PathBuf {
        self.artifacts.output_dir.join(name)
    }

    fn json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::runtime(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.text(name, &text)
    }

    fn text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.path(name);
        fs::write(&path, text).map_err(|e| CliError::runtime(format!("writing {}: {e}", path.display())))?;
        self.artifacts.files.push(path);
        Ok(())
    }

    fn csv(
        &mut self,
        name: &str,
        write: impl FnOnce(BufWriter<fs::File>) -> crate::Result<()>,
    ) -> Result<(), CliError> {
        let path = self.path(name);
        let file = fs::File::create(&path)
            .map_err(|e| CliError::runtime(format!("writing {}: {e}", path.display())))?;
        write(BufWriter::new(file))?;
        self.artifacts.files.push(path);
        Ok(())
    }
}

struct Timer {
    start: Instant,
    last: Instant,
    stages: Vec<(String, f64)>,
}

impl Timer {
    fn new() -> Self {
        let now = Instant::now();
        Self { start: now, last: now, stages: Vec::new() }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.stages.push((stage.to_string(), (now - self.last).as_secs_f64()));
        self.last = now;
    }
}

fn load_inputs(files: &InputFiles, schema: &CsvSchema) -> Result<Dataset, CliError> {
    let tables = files
        .files()
        .into_iter()
        .map(|f| {
            let mut s = schema.clone();
            if let Some(src) = f.source_set() {
                s.source_set = src;
            }
            load_csv(f.path(), &s).map_err(|e| CliError::from(e.with_context(f.path().display().to_string())))
        })
        .collect::<Result<Vec<Dataset>, _>>()?;
    if tables.len() == 1 {
        Ok(tables.into_iter().next().expect("one table"))
    } else {
        Ok(fuse(&tables)?)
    }
}

fn tune(train: &Dataset, spec: &Spec, cfg: &RunConfig, seed: u64) -> Result<(Spec, Option<GridSearch>), CliError> {
    if !spec.id().has_hyperparam() {
        return Ok((spec.clone(), None));
    }
    if !cfg.grid.search {
        let v = cfg.grid.value.expect("validated");
        return Ok((spec.with_hyperparam(v), None));
    }
    let g = grid_search(train, spec, seed)?;
    Ok((spec.with_hyperparam(g.chosen), Some(g)))
}

fn summary(cfg: &RunConfig, spec: &Spec, train: &Dataset, sel: &SelectionResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model: {}", cfg.model);
    match spec.hyperparam() {
        Some(v) if cfg.model == crate::ModelId::Ridge => {
            let _ = writeln!(s, "lambda: {v}");
        }
        Some(v) => {
            let _ = writeln!(s, "C: {v}");
        }
        None => {
            let _ = writeln!(s, "alpha: {}", f64::EPSILON.sqrt());
        }
    }
    let _ = writeln!(s, "features after pruning: {}", train.n_features());
    let _ = writeln!(s, "significance: {}", sel.significance);
    let _ = writeln!(s, "selected: {}", sel.cutoff_index);
    let _ = writeln!(s);
    let _ = writeln!(s, "rank\tfeature\tsource\tmean_importance\tp_value");
    for r in 0..sel.cutoff_index {
        let f = sel.ranked_features[r];
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{:.6e}\t{:.6e}",
            r + 1,
            sel.ranked_names[r],
            train.catalog().entries()[f].source,
            sel.mean_importance[r],
            sel.p_values[r]
        );
    }
    s
}

/// Executes `cfg` and writes its artifacts. Nothing is written unless the
/// config validates.
pub fn run_pipeline(cfg: &RunConfig, opts: RunOptions) -> Result<ArtifactSet, CliError> {
    let mut cfg = cfg.clone();
    if let Some(m) = opts.mode {
        cfg.mode = m;
    }
    if let Some(s) = opts.seed {
        cfg.master_seed = s;
    }
    cfg.validate()?;
    let mut timer = Timer::new();

    let raw_train = load_inputs(&cfg.paths.train, &cfg.schema)?;
    let (train, prune_report): (Dataset, PruneReport) = prune(&raw_train, cfg.variance_floor)?;
    let test = match &cfg.paths.test {
        Some(files) => {
            let raw = load_inputs(files, &cfg.schema)?;
            let names: Vec<&str> = train.catalog().names().collect();
            Some(
                raw.select_features_by_name(&names)
                    .map_err(|e| CliError::from(e.with_context("aligning test features to training")))?,
            )
        }
        None => None,
    };
    timer.lap("load");

    fs::create_dir_all(&cfg.paths.output_dir).map_err(|e| {
        CliError::config(format!("cannot create output_dir {}: {e}", cfg.paths.output_dir.display()))
    })?;
    let mut out = Writer {
        artifacts: ArtifactSet { output_dir: cfg.paths.output_dir.clone(), files: Vec::new() },
    };
    out.json("prune_report.json", &prune_report)?;

    let grid_seed = derive_seed(cfg.master_seed, &[u64::MAX]);
    let base = cfg.base_spec();
    let (spec, protocol_grid) = tune(&train, &base, &cfg, grid_seed)?;
    timer.lap("grid_search");

    let mode = cfg.mode;
    let evaluates = matches!(mode, RunMode::Loso | RunMode::Holdout | RunMode::Full);
    let nested = evaluates && cfg.evaluation.nested;
    let needs_ledger = matches!(mode, RunMode::Select | RunMode::Sweep | RunMode::Full)
        || (evaluates && cfg.evaluation.features != EvalFeatures::Named("all".into()));

    let mut ledger: Option<Ledger> = None;
    let mut selection: Option<SelectionResult> = None;
    if needs_ledger {
        let l = run_protocol(&train, &spec, cfg.master_seed, &cfg.protocol)?;
        let sel = rank_and_cut(&l, cfg.significance)?;
        timer.lap("selection");
        out.json("ledger.json", &l)?;
        out.csv("ledger.csv", |w| l.write_csv(w))?;
        out.json("selection.json", &sel)?;
        out.text("summary.txt", &summary(&cfg, &spec, &train, &sel))?;
        ledger = Some(l);
        selection = Some(sel);
    }

    let mut eval_grid = None;
    if evaluates {
        let eval_subset: Vec<usize> = match (&cfg.evaluation.features, &ledger, &selection) {
            (EvalFeatures::Named(n), _, _) if n == "all" => (0..train.n_features()).collect(),
            (EvalFeatures::TopK(k), Some(l), _) => select_top_k(l, *k)?,
            (EvalFeatures::Named(_), _, Some(sel)) => sel.selected.clone(),
            _ => Vec::new(),
        };
        if eval_subset.is_empty() {
            return Err(CliError::runtime(
                "no feature passed the significance cutoff; set evaluation.features to \"all\" or a count",
            ));
        }
        let scope = if matches!(cfg.evaluation.features, EvalFeatures::Named(ref n) if n == "all") {
            RankingScope::Unranked
        } else {
            RankingScope::InPool
        };
        let (eval_spec, g) = tune(&train.select_features(&eval_subset), &base, &cfg, grid_seed)?;
        eval_grid = g;
        timer.lap("evaluation_grid");
        if matches!(mode, RunMode::Loso | RunMode::Full) {
            let report: EvalReport = if let (true, EvalFeatures::TopK(k)) = (nested, &cfg.evaluation.features) {
                // Per-fold re-ranking; λ / C stay at the all-feature grid choice.
                loso_nested(&train, &spec, *k, &cfg.protocol, cfg.master_seed)?
            } else {
                loso(&train, &eval_spec, &eval_subset, scope)?
            };
            out.json("loso_report.json", &report)?;
            timer.lap("loso");
        }
        if let (true, Some(test)) = (matches!(mode, RunMode::Holdout | RunMode::Full), &test) {
            let report = holdout_eval(&train, test, &eval_spec, &eval_subset, scope)?;
            out.json("holdout_report.json", &report)?;
            timer.lap("holdout");
        }
    }
    out.json("grid_search.json", &GridReport {
        schema_version: SCHEMA_VERSION,
        protocol: protocol_grid,
        evaluation: eval_grid,
    })?;

    if matches!(mode, RunMode::Sweep | RunMode::Full) {
        let l = ledger.as_ref().expect("sweep modes build the ledger");
        let curve = sweep_feature_counts(
            &train,
            test.as_ref(),
            &spec,
            l,
            &SweepOptions {
                schedule: cfg.sweep.schedule(),
                regrid_per_k: cfg.sweep.regrid_per_k && cfg.grid.search,
                grid_seed,
            },
        )?;
        out.json("sweep.json", &curve)?;
        out.csv("sweep.csv", |w| curve.write_csv(w))?;
        timer.lap("sweep");
    }

    let meta = Meta {
        schema_version: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION"),
        rustc_target: std::env::consts::ARCH,
        threads: rayon::current_num_threads(),
        mode,
        wall_seconds: timer.start.elapsed().as_secs_f64(),
        stages: timer.stages,
    };
    out.json("meta.json", &meta)?;
    Ok(out.artifacts)
}

/// Best-effort error record next to the artifacts.
pub fn write_error_record(output_dir: &Path, err: &CliError) {
    if output_dir.is_dir() {
        let _ = fs::write(output_dir.join("error.json"), err.to_json() + "\n");
    }
}
