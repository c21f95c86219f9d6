use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureCatalog, Label, LabeledDataset, SourceSet};
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::Dataset;

/// Balanced two-class data with a planted signal.
///
/// The first `n_informative` columns (`informative_*`) are drawn from
/// N(∓effect_size/2, 1) for Control/AD; the remaining `noise_*` columns are
/// N(0, 1) for both classes. Subjects alternate Control, AD, Control, ...
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_subjects: usize,
    pub n_features: usize,
    pub n_informative: usize,
    pub effect_size: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_subjects: 108,
            n_features: 500,
            n_informative: 10,
            effect_size: 2.0,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn informative_names(&self) -> Vec<String> {
        (0..self.n_informative).map(|j| format!("informative_{j:04}")).collect()
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.n_subjects < 2 {
        return Err(Error::InvalidParameter("need at least two subjects".into()));
    }
    if spec.n_informative > spec.n_features {
        return Err(Error::InvalidParameter(format!(
            "n_informative ({}) exceeds n_features ({})",
            spec.n_informative, spec.n_features
        )));
    }
    if !(spec.effect_size.is_finite()) {
        return Err(Error::InvalidParameter("effect_size must be finite".into()));
    }
    let mut rng = stream(spec.seed);
    let labels: Vec<Label> = (0..spec.n_subjects)
        .map(|i| if i % 2 == 0 { Label::Control } else { Label::Ad })
        .collect();
    let half = spec.effect_size / 2.0;
    let x = Array2::from_shape_fn((spec.n_subjects, spec.n_features), |(i, j)| {
        let z: f64 = StandardNormal.sample(&mut rng);
        if j < spec.n_informative {
            z + half * labels[i].signed::<f64>()
        } else {
            z
        }
    });
    let names = spec
        .informative_names()
        .into_iter()
        .chain((spec.n_informative..spec.n_features).map(|j| format!("noise_{j:04}")));
    let catalog = FeatureCatalog::from_names(names, SourceSet::Other)?;
    let subjects = (0..spec.n_subjects).map(|i| format!("S{i:04}")).collect();
    LabeledDataset::new(subjects, x, labels, catalog)
}
