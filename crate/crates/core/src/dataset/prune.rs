use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sample-variance floor below which a feature counts as constant.
pub const DEFAULT_VARIANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PruneReason {
    LowVariance,
    DuplicateOf(String),
}

impl fmt::Display for PruneReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PruneReason::LowVariance => f.write_str("low_variance"),
            PruneReason::DuplicateOf(name) => write!(f, "duplicate_of:{name}"),
        }
    }
}

impl From<PruneReason> for String {
    fn from(r: PruneReason) -> Self {
        r.to_string()
    }
}

impl TryFrom<String> for PruneReason {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        if s == "low_variance" {
            Ok(PruneReason::LowVariance)
        } else if let Some(name) = s.strip_prefix("duplicate_of:") {
            Ok(PruneReason::DuplicateOf(name.to_string()))
        } else {
            Err(format!("unknown prune reason {s:?}"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedFeature {
    pub feature: String,
    pub reason: PruneReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneReport {
    pub variance_floor: f64,
    pub input_features: usize,
    pub kept_features: usize,
    pub low_variance: usize,
    pub duplicates: usize,
    /// True when nothing survived.
    pub empty: bool,
    pub dropped: Vec<DroppedFeature>,
}

fn sample_variance<T: Scalar>(col: ndarray::ArrayView1<'_, T>) -> T {
    let n = T::lit(col.len() as f64);
    let mean = col.iter().copied().sum::<T>() / n;
    col.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (n - T::one())
}

/// Drops features whose sample variance is below `variance_floor`, then
/// exact-duplicate columns (bitwise-equal values), keeping the first
/// occurrence in catalog order.
pub fn prune<T: Scalar>(
    ds: &LabeledDataset<T>,
    variance_floor: f64,
) -> Result<(LabeledDataset<T>, PruneReport)> {
    if ds.n_subjects() < 2 {
        return Err(Error::InvalidDataset(
            "variance pruning needs at least two subjects".into(),
        ));
    }
    let x = ds.x();
    let mut dropped = Vec::new();
    let mut survivors = Vec::with_capacity(ds.n_features());
    for (j, col) in x.columns().into_iter().enumerate() {
        if sample_variance(col).as_f64() < variance_floor {
            dropped.push(DroppedFeature {
                feature: ds.catalog().name(j).to_string(),
                reason: PruneReason::LowVariance,
            });
        } else {
            survivors.push(j);
        }
    }
    let low_variance = dropped.len();

    let mut first_seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut kept = Vec::with_capacity(survivors.len());
    for j in survivors {
        let key: Vec<u64> = x.column(j).iter().map(|v| v.bits()).collect();
        match first_seen.get(&key) {
            Some(&orig) => dropped.push(DroppedFeature {
                feature: ds.catalog().name(j).to_string(),
                reason: PruneReason::DuplicateOf(ds.catalog().name(orig).to_string()),
            }),
            None => {
                first_seen.insert(key, j);
                kept.push(j);
            }
        }
    }
    let report = PruneReport {
        variance_floor,
        input_features: ds.n_features(),
        kept_features: kept.len(),
        low_variance,
        duplicates: dropped.len() - low_variance,
        empty: kept.is_empty(),
        dropped,
    };
    Ok((ds.select_features(&kept), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FeatureCatalog, Label, SourceSet};
    use ndarray::Array2;
    use proptest::prelude::*;

    fn dataset(x: Array2<f64>) -> LabeledDataset<f64> {
        let n = x.nrows();
        let p = x.ncols();
        LabeledDataset::new(
            (0..n).map(|i| format!("s{i}")).collect(),
            x,
            (0..n).map(|i| if i % 2 == 0 { Label::Control } else { Label::Ad }).collect(),
            FeatureCatalog::from_names((0..p).map(|j| format!("f{j}")), SourceSet::Other).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn constant_column_is_low_variance() {
        let ds = dataset(ndarray::array![[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]);
        let (out, rep) = prune(&ds, DEFAULT_VARIANCE_FLOOR).unwrap();
        assert_eq!(out.catalog().names().collect::<Vec<_>>(), ["f0"]);
        assert_eq!(rep.dropped[0].reason, PruneReason::LowVariance);
    }

    #[test]
    fn second_duplicate_is_dropped() {
        let ds = dataset(ndarray::array![[1.0, 9.0, 1.0], [2.0, 8.0, 2.0], [3.0, 7.0, 3.0]]);
        let (out, rep) = prune(&ds, DEFAULT_VARIANCE_FLOOR).unwrap();
        assert_eq!(out.catalog().names().collect::<Vec<_>>(), ["f0", "f1"]);
        assert_eq!(rep.dropped[0].reason, PruneReason::DuplicateOf("f0".into()));
        assert_eq!(rep.duplicates, 1);
    }

    #[test]
    fn counts_match_the_fused_opensmile_table() {
        // 7449 columns: 157 constant, 369 copies of earlier columns, 6923 distinct.
        let n = 6;
        let distinct = 6923;
        let x = Array2::from_shape_fn((n, 7449), |(i, j)| {
            if j < distinct {
                ((i * 7919 + j * 104_729) % 1_000_003) as f64 + j as f64 * 1e-3
            } else if j < distinct + 157 {
                1.0
            } else {
                let src = j - distinct - 157;
                ((i * 7919 + src * 104_729) % 1_000_003) as f64 + src as f64 * 1e-3
            }
        });
        let (out, rep) = prune(&dataset(x), DEFAULT_VARIANCE_FLOOR).unwrap();
        assert_eq!(out.n_features(), 6923);
        assert_eq!(rep.low_variance, 157);
        assert_eq!(rep.duplicates, 369);
    }

    #[test]
    fn everything_dropped_is_flagged() {
        let ds = dataset(Array2::from_elem((3, 2), 4.0));
        let (out, rep) = prune(&ds, DEFAULT_VARIANCE_FLOOR).unwrap();
        assert_eq!(out.n_features(), 0);
        assert!(rep.empty);
    }

    #[test]
    fn reason_serializes_as_tagged_string() {
        let d = DroppedFeature {
            feature: "b".into(),
            reason: PruneReason::DuplicateOf("a".into()),
        };
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"feature":"b","reason":"duplicate_of:a"}"#);
        assert_eq!(serde_json::from_str::<DroppedFeature>(&s).unwrap(), d);
    }

    proptest! {
        #[test]
        fn prune_is_idempotent(
            cells in proptest::collection::vec(0u8..3, 4 * 6),
        ) {
            let x = Array2::from_shape_fn((4, 6), |(i, j)| cells[i * 6 + j] as f64);
            let (once, _) = prune(&dataset(x), DEFAULT_VARIANCE_FLOOR).unwrap();
            let (twice, rep) = prune(&once, DEFAULT_VARIANCE_FLOOR).unwrap();
            prop_assert_eq!(&twice, &once);
            prop_assert!(rep.dropped.is_empty());
        }
    }
}
