//! Small dense linear-algebra kernels: Cholesky factorization of symmetric
//! positive-definite systems and a power iteration for the top eigenvalue.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    lower: Array2<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Factors a symmetric positive-definite matrix. Only the lower triangle
    /// of `a` is read.
    pub fn factor(a: ArrayView2<'_, T>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "square matrix",
                expected: n,
                got: a.ncols(),
            });
        }
        let mut l = Array2::<T>::zeros((n, n));
        for j in 0..n {
            let mut diag = a[[j, j]];
            for k in 0..j {
                diag -= l[[j, k]] * l[[j, k]];
            }
            if !(diag > T::zero()) || !diag.is_finite() {
                return Err(Error::Singular(format!(
                    "non-positive pivot {} at column {j}",
                    diag
                )));
            }
            let d = diag.sqrt();
            l[[j, j]] = d;
            for i in (j + 1)..n {
                let mut s = a[[i, j]];
                for k in 0..j {
                    s -= l[[i, k]] * l[[j, k]];
                }
                l[[i, j]] = s / d;
            }
        }
        Ok(Self { lower: l })
    }

    /// [`Cholesky::factor`], retrying with a growing diagonal shift when
    /// rounding makes a mathematically definite matrix fail. The first shift
    /// is `dim · ε · max|aᵢᵢ|`; it is multiplied by 10 per retry. Returns the
    /// factor and the shift that was added (zero when none was needed).
    pub fn factor_loaded(a: ArrayView2<'_, T>) -> Result<(Self, T)> {
        let first = match Self::factor(a) {
            Ok(c) => return Ok((c, T::zero())),
            Err(e @ Error::DimensionMismatch { .. }) => return Err(e),
            Err(e) => e,
        };
        let n = a.nrows();
        let scale = a.diag().iter().fold(T::zero(), |m, &d| m.max(d.abs()));
        if !scale.is_finite() || scale == T::zero() {
            return Err(first);
        }
        let mut shift = T::lit(n as f64) * T::epsilon() * scale;
        let mut shifted = a.to_owned();
        for _ in 0..16 {
            for j in 0..n {
                shifted[[j, j]] = a[[j, j]] + shift;
            }
            if let Ok(c) = Self::factor(shifted.view()) {
                return Ok((c, shift));
            }
            shift *= T::lit(10.0);
        }
        Err(first)
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    /// Ratio of the smallest to the largest squared pivot, a cheap lower
    /// bound proxy for the reciprocal condition number.
    pub fn pivot_ratio(&self) -> T {
        let diag = self.lower.diag();
        let (lo, hi) = diag.iter().fold((T::infinity(), T::zero()), |(lo, hi), &d| {
            (lo.min(d * d), hi.max(d * d))
        });
        if hi == T::zero() {
            T::zero()
        } else {
            lo / hi
        }
    }

    /// Solves `A x = b`.
    pub fn solve_vec(&self, b: ArrayView1<'_, T>) -> Array1<T> {
        let n = self.dim();
        assert_eq!(b.len(), n, "rhs length");
        let l = &self.lower;
        let mut z = b.to_owned();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= l[[i, k]] * z[k];
            }
            z[i] = s / l[[i, i]];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= l[[k, i]] * z[k];
            }
            z[i] = s / l[[i, i]];
        }
        z
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: ArrayView2<'_, T>) -> Array2<T> {
        let mut out = Array2::<T>::zeros(b.raw_dim());
        for (col_in, mut col_out) in b.axis_iter(Axis(1)).zip(out.axis_iter_mut(Axis(1))) {
            col_out.assign(&self.solve_vec(col_in));
        }
        out
    }
}

/// Largest eigenvalue of the symmetric positive semi-definite operator
/// `v ↦ apply(v)` by power iteration with a Rayleigh-quotient estimate.
pub fn power_iteration<T, F>(dim: usize, max_iters: usize, rel_tol: T, mut apply: F) -> T
where
    T: Scalar,
    F: FnMut(&Array1<T>) -> Array1<T>,
{
    if dim == 0 {
        return T::zero();
    }
    // Non-symmetric start vector so that no eigenvector is trivially orthogonal.
    let mut v = Array1::from_shape_fn(dim, |i| T::one() + T::lit(1e-3) * T::lit(i as f64));
    let norm = v.dot(&v).sqrt();
    v.mapv_inplace(|x| x / norm);
    let mut estimate = T::zero();
    for _ in 0..max_iters {
        let w = apply(&v);
        let rayleigh = v.dot(&w);
        let wn = w.dot(&w).sqrt();
        if wn == T::zero() {
            return T::zero();
        }
        v = w.mapv(|x| x / wn);
        if (rayleigh - estimate).abs() <= rel_tol * rayleigh.abs() {
            return rayleigh.max(estimate);
        }
        estimate = rayleigh;
    }
    estimate
}
