use std::fmt;

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// SHA-256 over the sorted subject ids a parameter set was fitted on.
///
/// Sorting makes the fingerprint a function of the subject *set*, so a fold's
/// parameters can be checked against the ids it is supposed to exclude.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fingerprint(String);

impl Fingerprint {
    pub fn of<S: AsRef<str>>(ids: &[S]) -> Self {
        let mut sorted: Vec<&str> = ids.iter().map(AsRef::as_ref).collect();
        sorted.sort_unstable();
        let mut h = Sha256::new();
        for id in sorted {
            h.update(id.as_bytes());
            h.update([0u8]);
        }
        Fingerprint(hex::encode(h.finalize()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Per-feature min–max scaling coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NormalizationParams<T: Scalar> {
    pub min: Vec<T>,
    pub max: Vec<T>,
    pub fitted_on: Fingerprint,
}

impl<T: Scalar> NormalizationParams<T> {
    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }

    /// Scales a matrix with these coefficients; constant features map to 0.
    /// Values outside the fitted range are not clamped.
    pub fn transform(&self, x: ndarray::ArrayView2<'_, T>) -> Result<Array2<T>> {
        if x.ncols() != self.len() {
            return Err(Error::DimensionMismatch {
                what: "normalization feature count",
                expected: self.len(),
                got: x.ncols(),
            });
        }
        let mut out = x.to_owned();
        for (j, mut col) in out.columns_mut().into_iter().enumerate() {
            let (lo, hi) = (self.min[j], self.max[j]);
            let span = hi - lo;
            if span > T::zero() {
                col.mapv_inplace(|v| (v - lo) / span);
            } else {
                col.fill(T::zero());
            }
        }
        Ok(out)
    }
}

pub fn fit_minmax<T: Scalar>(ds: &LabeledDataset<T>) -> Result<NormalizationParams<T>> {
    if ds.n_subjects() == 0 {
        return Err(Error::InvalidDataset("cannot fit normalization on zero rows".into()));
    }
    let x = ds.x();
    let mut min = x.row(0).to_vec();
    let mut max = min.clone();
    for row in x.rows().into_iter().skip(1) {
        Zip::from(&row)
            .and(&mut min[..])
            .and(&mut max[..])
            .for_each(|&v, lo, hi| {
                if v < *lo {
                    *lo = v;
                }
                if v > *hi {
                    *hi = v;
                }
            });
    }
    Ok(NormalizationParams {
        min,
        max,
        fitted_on: Fingerprint::of(ds.subjects()),
    })
}

pub fn apply_minmax<T: Scalar>(
    ds: &LabeledDataset<T>,
    params: &NormalizationParams<T>,
) -> Result<LabeledDataset<T>> {
    Ok(ds.replace_x(params.transform(ds.x())?))
}
