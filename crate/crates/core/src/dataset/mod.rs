//! Tabular acoustic feature data: the labelled subject × feature matrix,
//! its feature catalog, and the ingestion/fusion/pruning/normalization steps
//! applied before any model sees it.

mod csv_io;
mod fuse;
mod normalize;
mod prune;

use std::collections::HashSet;
use std::fmt;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use csv_io::{load_csv, read_csv, write_csv, CsvSchema};
pub use fuse::fuse;
pub use normalize::{apply_minmax, fit_minmax, Fingerprint, NormalizationParams};
pub use prune::{prune, DroppedFeature, PruneReason, PruneReport, DEFAULT_VARIANCE_FLOOR};

/// Diagnostic class of a subject. `Ad` is the positive class everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Control,
    #[serde(rename = "AD")]
    Ad,
}

impl Label {
    /// ±1 encoding used by the linear models (Control → −1, AD → +1).
    pub fn signed<T: Scalar>(self) -> T {
        match self {
            Label::Control => -T::one(),
            Label::Ad => T::one(),
        }
    }

    /// Decision rule on a real score: non-negative scores are AD.
    pub fn from_score<T: Scalar>(score: T) -> Self {
        if score >= T::zero() {
            Label::Ad
        } else {
            Label::Control
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Control => f.write_str("Control"),
            Label::Ad => f.write_str("AD"),
        }
    }
}

/// openSMILE feature set a column came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum SourceSet {
    #[serde(rename = "eGeMAPS")]
    EGeMaps,
    EmoBase,
    ComParE,
    #[default]
    #[serde(rename = "other")]
    Other,
}

impl fmt::Display for SourceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceSet::EGeMaps => "eGeMAPS",
            SourceSet::EmoBase => "EmoBase",
            SourceSet::ComParE => "ComParE",
            SourceSet::Other => "other",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureEntry {
    pub name: String,
    pub source: SourceSet,
}

/// Ordered feature names; the order is the column order of every matrix
/// derived from the dataset.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureCatalog {
    entries: Vec<FeatureEntry>,
}

impl FeatureCatalog {
    pub fn new(entries: Vec<FeatureEntry>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(entries.len());
        for e in &entries {
            if !seen.insert(e.name.as_str()) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate feature name {:?}",
                    e.name
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn from_names<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        source: SourceSet,
    ) -> Result<Self> {
        Self::new(
            names
                .into_iter()
                .map(|n| FeatureEntry {
                    name: n.into(),
                    source,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FeatureEntry] {
        &self.entries
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.entries[idx].name
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    /// Sub-catalog in the order of `indices`.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            entries: indices.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTag {
    Train,
    Test,
}

/// Subjects × features matrix with one binary label per subject.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<T> {
    subjects: Vec<String>,
    x: Array2<T>,
    y: Vec<Label>,
    catalog: FeatureCatalog,
    split: Option<SplitTag>,
}

impl<T: Scalar> LabeledDataset<T> {
    /// Builds a dataset, checking shapes, finiteness and subject uniqueness.
    pub fn new(
        subjects: Vec<String>,
        x: Array2<T>,
        y: Vec<Label>,
        catalog: FeatureCatalog,
    ) -> Result<Self> {
        if x.nrows() != subjects.len() || y.len() != subjects.len() {
            return Err(Error::InvalidDataset(format!(
                "{} subjects, {} matrix rows, {} labels",
                subjects.len(),
                x.nrows(),
                y.len()
            )));
        }
        if x.ncols() != catalog.len() {
            return Err(Error::InvalidDataset(format!(
                "{} matrix columns but {} catalog entries",
                x.ncols(),
                catalog.len()
            )));
        }
        if let Some(((r, c), _)) = x.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite value for subject {:?}, feature {:?}",
                subjects[r],
                catalog.name(c)
            )));
        }
        let mut seen = HashSet::with_capacity(subjects.len());
        for s in &subjects {
            if !seen.insert(s.as_str()) {
                return Err(Error::InvalidDataset(format!("duplicate subject id {s:?}")));
            }
        }
        Ok(Self {
            subjects,
            x,
            y,
            catalog,
            split: None,
        })
    }

    pub fn with_split(mut self, split: Option<SplitTag>) -> Self {
        self.split = split;
        self
    }

    pub fn n_subjects(&self) -> usize {
        self.subjects.len()
    }

    pub fn n_features(&self) -> usize {
        self.catalog.len()
    }

    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    pub fn x(&self) -> ArrayView2<'_, T> {
        self.x.view()
    }

    pub fn labels(&self) -> &[Label] {
        &self.y
    }

    pub fn catalog(&self) -> &FeatureCatalog {
        &self.catalog
    }

    pub fn split(&self) -> Option<SplitTag> {
        self.split
    }

    pub fn count(&self, label: Label) -> usize {
        self.y.iter().filter(|&&l| l == label).count()
    }

    /// Rows in the order of `rows`.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            subjects: rows.iter().map(|&r| self.subjects[r].clone()).collect(),
            x: self.x.select(Axis(0), rows),
            y: rows.iter().map(|&r| self.y[r]).collect(),
            catalog: self.catalog.clone(),
            split: self.split,
        }
    }

    /// Columns in the order of `cols`.
    pub fn select_features(&self, cols: &[usize]) -> Self {
        Self {
            subjects: self.subjects.clone(),
            x: self.x.select(Axis(1), cols),
            y: self.y.clone(),
            catalog: self.catalog.select(cols),
            split: self.split,
        }
    }

    /// Columns matching `names`, in that order.
    pub fn select_features_by_name<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let idx = names
            .iter()
            .map(|n| {
                self.catalog.position(n.as_ref()).ok_or_else(|| {
                    Error::InvalidDataset(format!("feature {:?} not in catalog", n.as_ref()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.select_features(&idx))
    }

    pub(crate) fn replace_x(&self, x: Array2<T>) -> Self {
        debug_assert_eq!(x.dim(), self.x.dim());
        Self {
            subjects: self.subjects.clone(),
            x,
            y: self.y.clone(),
            catalog: self.catalog.clone(),
            split: self.split,
        }
    }
}
