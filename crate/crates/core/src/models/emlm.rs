//! Extreme Minimal Learning Machine.
//!
//! A distance-based classifier: the inputs are mapped to their Euclidean
//! distances from a set of reference points, and a ridge-regularized linear
//! output layer maps distances to 1-of-k class indicators. Here every
//! training sample is a reference point.
//!
//! Feature importances are mean absolute output sensitivities over the
//! training samples, using the closed-form Jacobian of the distance layer.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::scalar::Scalar;

/// Euclidean distances `H[i][j] = ‖rᵢ − xⱼ‖₂` between reference rows and
/// sample rows. The inner sum runs over features in column order.
pub fn distance_matrix<T: Scalar>(refs: ArrayView2<'_, T>, x: ArrayView2<'_, T>) -> Result<Array2<T>> {
    if refs.ncols() != x.ncols() {
        return Err(Error::DimensionMismatch {
            what: "distance feature count",
            expected: refs.ncols(),
            got: x.ncols(),
        });
    }
    let (m, n) = (refs.nrows(), x.nrows());
    let rows: Vec<Vec<T>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let r = refs.row(i);
            (0..n)
                .map(|j| {
                    let mut s = T::zero();
                    for (&a, &b) in r.iter().zip(x.row(j).iter()) {
                        let d = a - b;
                        s += d * d;
                    }
                    s.sqrt()
                })
                .collect()
        })
        .collect();
    Ok(Array2::from_shape_vec((m, n), rows.into_iter().flatten().collect()).expect("m×n buffer"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", default)]
pub struct EmlmConfig<T: Scalar> {
    /// Output-layer regularizer; defaults to √ε of the scalar type.
    pub alpha: T,
}

impl<T: Scalar> Default for EmlmConfig<T> {
    fn default() -> Self {
        Self {
            alpha: T::sqrt_epsilon(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", into = "EmlmJson<T>", try_from = "EmlmJson<T>")]
pub struct EmlmModel<T: Scalar> {
    pub alpha: T,
    pub class_order: Vec<Label>,
    /// m × n reference points.
    pub references: Array2<T>,
    /// k × m output weights.
    pub weights: Array2<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
struct EmlmJson<T: Scalar> {
    alpha: T,
    class_order: Vec<Label>,
    references: Vec<Vec<T>>,
    #[serde(rename = "W")]
    weights: Vec<Vec<T>>,
}

fn to_rows<T: Scalar>(a: &Array2<T>) -> Vec<Vec<T>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn from_rows<T: Scalar>(rows: Vec<Vec<T>>, what: &str) -> std::result::Result<Array2<T>, String> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(format!("ragged {what} matrix"));
    }
    Array2::from_shape_vec((r, c), rows.into_iter().flatten().collect()).map_err(|e| e.to_string())
}

impl<T: Scalar> From<EmlmModel<T>> for EmlmJson<T> {
    fn from(m: EmlmModel<T>) -> Self {
        Self {
            alpha: m.alpha,
            class_order: m.class_order,
            references: to_rows(&m.references),
            weights: to_rows(&m.weights),
        }
    }
}

impl<T: Scalar> TryFrom<EmlmJson<T>> for EmlmModel<T> {
    type Error = String;

    fn try_from(j: EmlmJson<T>) -> std::result::Result<Self, String> {
        let references = from_rows(j.references, "references")?;
        let weights = from_rows(j.weights, "W")?;
        if weights.nrows() != j.class_order.len() || weights.ncols() != references.nrows() {
            return Err("W must be classes × references".into());
        }
        Ok(Self {
            alpha: j.alpha,
            class_order: j.class_order,
            references,
            weights,
        })
    }
}

/// Solves `W (HHᵀ + (αN/m) I) = Y Hᵀ` with every sample as a reference.
pub fn emlm_fit<T: Scalar>(x: ArrayView2<'_, T>, y: &[Label], cfg: &EmlmConfig<T>) -> Result<EmlmModel<T>> {
    let n_samples = x.nrows();
    if y.len() != n_samples {
        return Err(Error::DimensionMismatch {
            what: "EMLM labels",
            expected: n_samples,
            got: y.len(),
        });
    }
    if n_samples < 2 {
        return Err(Error::InvalidParameter("EMLM needs at least two samples".into()));
    }
    if !(cfg.alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {}", cfg.alpha)));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("EMLM inputs"));
    }
    let mut class_order: Vec<Label> = y.to_vec();
    class_order.sort_unstable();
    class_order.dedup();
    if class_order.len() < 2 {
        return Err(Error::InvalidParameter("EMLM needs at least two classes".into()));
    }

    let h = distance_matrix(x, x)?;
    let m = h.nrows();
    let mut system = h.dot(&h.t());
    let ridge = cfg.alpha * T::lit(n_samples as f64) / T::lit(m as f64);
    system.diag_mut().mapv_inplace(|d| d + ridge);

    // Hᵀ-side right-hand side: (H Yᵀ)[i][c] = Σ_j H[i][j]·[y_j = class c].
    let mut rhs = Array2::<T>::zeros((m, class_order.len()));
    for (j, label) in y.iter().enumerate() {
        let c = class_order.iter().position(|l| l == label).expect("class present");
        let mut col = rhs.column_mut(c);
        col += &h.column(j);
    }
    // The ridge is absolute, so on unscaled inputs with duplicate rows it can
    // drown in rounding; a minimal extra diagonal shift is added then.
    let (chol, _) = Cholesky::factor_loaded(system.view())
        .map_err(|e| e.with_context("EMLM output-layer factorization"))?;
    let weights = chol.solve_mat(rhs.view()).reversed_axes();
    Ok(EmlmModel {
        alpha: cfg.alpha,
        class_order,
        references: x.to_owned(),
        weights,
    })
}

impl<T: Scalar> EmlmModel<T> {
    pub fn n_features(&self) -> usize {
        self.references.ncols()
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.n_features() {
            return Err(Error::DimensionMismatch {
                what: "EMLM feature count",
                expected: self.n_features(),
                got,
            });
        }
        Ok(())
    }

    /// Class scores `W·H*` for every row of `x` (rows = samples, cols = classes).
    pub fn scores(&self, x: ArrayView2<'_, T>) -> Result<Array2<T>> {
        self.check_dim(x.ncols())?;
        let h = distance_matrix(self.references.view(), x)?;
        Ok(self.weights.dot(&h).reversed_axes())
    }

    /// Arg-max class, ties resolved towards the earlier entry of `class_order`.
    pub fn decide(&self, scores: ArrayView1<'_, T>) -> Label {
        let mut best = 0;
        for c in 1..scores.len() {
            if scores[c] > scores[best] {
                best = c;
            }
        }
        self.class_order[best]
    }

    pub fn predict_one(&self, x: ArrayView1<'_, T>) -> Result<(Vec<T>, Label)> {
        let s = self.scores(x.insert_axis(Axis(0)))?;
        let row = s.row(0);
        Ok((row.to_vec(), self.decide(row)))
    }

    pub fn predict(&self, x: ArrayView2<'_, T>) -> Result<Vec<Label>> {
        let s = self.scores(x)?;
        Ok(s.rows().into_iter().map(|r| self.decide(r)).collect())
    }

    /// Jacobian of the class scores at `x` (k × n): `W·D` where row `i` of `D`
    /// is `(x − rᵢ)/max(ε, ‖x − rᵢ‖₂)`.
    pub fn output_jacobian(&self, x: ArrayView1<'_, T>) -> Result<Array2<T>> {
        self.check_dim(x.len())?;
        let eps = T::epsilon();
        let mut d = &x.insert_axis(Axis(0)) - &self.references;
        for mut row in d.rows_mut() {
            let norm = row.dot(&row).sqrt();
            let denom = if norm > eps { norm } else { eps };
            row.mapv_inplace(|v| v / denom);
        }
        Ok(self.weights.dot(&d))
    }

    /// Mean absolute sensitivity per feature over the rows of `x_train`,
    /// averaged over the class outputs.
    ///
    /// Uses `J = (Σᵢ aᵢ) xᵀ − A·R` with `aᵢ = W[:, i]/‖x − rᵢ‖`, batched over
    /// samples; references within ε of `x` keep the direct form.
    pub fn importance(&self, x_train: ArrayView2<'_, T>) -> Result<Vec<T>> {
        self.check_dim(x_train.ncols())?;
        let n = x_train.nrows();
        let n_features = self.n_features();
        let k = self.class_order.len();
        if n == 0 {
            return Ok(vec![T::zero(); n_features]);
        }
        let eps = T::epsilon();
        let dist = distance_matrix(self.references.view(), x_train)?;
        let m = self.references.nrows();
        // Row s·k + c holds a for sample s, class c.
        let mut a = Array2::<T>::zeros((n * k, m));
        let mut near = Vec::new();
        for s in 0..n {
            for i in 0..m {
                let d = dist[[i, s]];
                if d > eps {
                    for c in 0..k {
                        a[[s * k + c, i]] = self.weights[[c, i]] / d;
                    }
                } else {
                    near.push((s, i));
                }
            }
        }
        let mut jac = a.dot(&self.references);
        jac.mapv_inplace(|v| -v);
        for s in 0..n {
            let xs = x_train.row(s);
            for c in 0..k {
                let row_sum: T = a.row(s * k + c).sum();
                jac.row_mut(s * k + c).scaled_add(row_sum, &xs);
            }
        }
        for &(s, i) in &near {
            let diff = &x_train.row(s) - &self.references.row(i);
            for c in 0..k {
                jac.row_mut(s * k + c).scaled_add(self.weights[[c, i]] / eps, &diff);
            }
        }
        let scale = T::lit((n * k) as f64);
        Ok(jac.mapv(T::abs).sum_axis(Axis(0)).iter().map(|&v| v / scale).collect())
    }
}
