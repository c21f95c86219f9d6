//! Ridge regression used as a binary classifier.
//!
//! Labels are encoded Control → −1, AD → +1 and the regression output is
//! thresholded at zero. The intercept is fitted by centering the columns of
//! `X` and the targets, so the penalty only touches the coefficients.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::linalg::{power_iteration, Cholesky};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RidgeSolver {
    #[default]
    ClosedForm,
    Gradient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", default)]
pub struct RidgeConfig<T: Scalar> {
    pub lambda: T,
    /// Gradient step; `None` selects 1/(2L) with L the top eigenvalue of XᵀX + λI.
    pub learning_rate: Option<T>,
    pub max_iters: usize,
    /// Stop once ‖∇J‖₂ falls below this value.
    pub grad_tol: T,
    pub solver: RidgeSolver,
}

impl<T: Scalar> Default for RidgeConfig<T> {
    fn default() -> Self {
        Self {
            lambda: T::one(),
            learning_rate: None,
            max_iters: 1_000_000,
            grad_tol: T::lit(1e-10),
            solver: RidgeSolver::ClosedForm,
        }
    }
}

impl<T: Scalar> RidgeConfig<T> {
    pub fn with_lambda(lambda: T) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda >= T::zero()) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if let Some(eta) = self.learning_rate {
            if !(eta > T::zero()) {
                return Err(Error::InvalidParameter(format!("learning rate must be > 0, got {eta}")));
            }
        }
        if self.max_iters == 0 || !(self.grad_tol > T::zero()) {
            return Err(Error::InvalidParameter("max_iters and grad_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RidgeModel<T: Scalar> {
    pub lambda: T,
    pub beta: Vec<T>,
    pub intercept: T,
    #[serde(default)]
    pub feature_names: Vec<String>,
}

/// Centered least-squares problem `J(β) = ‖y − Xβ‖² + λ‖β‖²`.
#[derive(Debug, Clone)]
pub struct RidgeProblem<T> {
    x: Array2<T>,
    y: Array1<T>,
    x_mean: Array1<T>,
    y_mean: T,
    lambda: T,
}

impl<T: Scalar> RidgeProblem<T> {
    pub fn new(x: ArrayView2<'_, T>, y: &[T], lambda: T) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                what: "ridge targets",
                expected: x.nrows(),
                got: y.len(),
            });
        }
        if x.nrows() < 2 {
            return Err(Error::InvalidParameter("ridge needs at least two samples".into()));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ridge inputs"));
        }
        let x_mean = x.mean_axis(Axis(0)).expect("non-empty");
        let y = Array1::from(y.to_vec());
        let y_mean = y.mean().expect("non-empty");
        Ok(Self {
            x: &x - &x_mean,
            y: y.mapv(|v| v - y_mean),
            x_mean,
            y_mean,
            lambda,
        })
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn objective(&self, beta: ArrayView1<'_, T>) -> T {
        let r = &self.y - &self.x.dot(&beta);
        r.dot(&r) + self.lambda * beta.dot(&beta)
    }

    /// ∇J = −2Xᵀ(y − Xβ) + 2λβ.
    pub fn gradient(&self, beta: ArrayView1<'_, T>) -> Array1<T> {
        let two = T::lit(2.0);
        let r = &self.y - &self.x.dot(&beta);
        let mut g = self.x.t().dot(&r);
        g.zip_mut_with(&beta, |gi, &bi| *gi = -two * *gi + two * self.lambda * bi);
        g
    }

    /// β = (XᵀX + λI)⁻¹Xᵀy, evaluated in the dual form Xᵀ(XXᵀ + λI)⁻¹y when
    /// there are more features than samples.
    pub fn solve_closed_form(&self) -> Result<Array1<T>> {
        let (n_rows, n_cols) = self.x.dim();
        let lambda = self.lambda;
        if n_cols <= n_rows {
            let mut gram = self.x.t().dot(&self.x);
            gram.diag_mut().mapv_inplace(|d| d + lambda);
            let chol = Cholesky::factor(gram.view())?;
            if lambda == T::zero() && chol.pivot_ratio() < T::epsilon() * T::lit(1e3 * n_cols as f64) {
                return Err(Error::Singular("XᵀX is rank deficient and lambda = 0".into()));
            }
            Ok(chol.solve_vec(self.x.t().dot(&self.y).view()))
        } else {
            if lambda == T::zero() {
                return Err(Error::Singular(format!(
                    "lambda = 0 with {n_cols} features and {n_rows} samples"
                )));
            }
            let mut gram = self.x.dot(&self.x.t());
            gram.diag_mut().mapv_inplace(|d| d + lambda);
            let dual = Cholesky::factor(gram.view())?.solve_vec(self.y.view());
            Ok(self.x.t().dot(&dual))
        }
    }

    /// Largest eigenvalue of XᵀX + λI.
    pub fn lipschitz_estimate(&self) -> T {
        let (n_rows, n_cols) = self.x.dim();
        // XᵀX and XXᵀ share their non-zero spectrum; iterate on the smaller one.
        let top = if n_cols <= n_rows {
            power_iteration(n_cols, 10_000, T::lit(1e-12), |v| self.x.t().dot(&self.x.dot(v)))
        } else {
            power_iteration(n_rows, 10_000, T::lit(1e-12), |v| self.x.dot(&self.x.t().dot(v)))
        };
        top + self.lambda
    }

    /// Plain gradient descent from β = 0.
    pub fn solve_gradient(&self, cfg: &RidgeConfig<T>) -> Array1<T> {
        let eta = cfg
            .learning_rate
            .unwrap_or_else(|| T::one() / (T::lit(2.0) * self.lipschitz_estimate()));
        let mut beta = Array1::<T>::zeros(self.n_features());
        for _ in 0..cfg.max_iters {
            let g = self.gradient(beta.view());
            if g.dot(&g).sqrt() < cfg.grad_tol {
                break;
            }
            beta.scaled_add(-eta, &g);
        }
        beta
    }

    fn intercept(&self, beta: &Array1<T>) -> T {
        self.y_mean - self.x_mean.dot(beta)
    }
}

/// Fits ridge coefficients to ±1 targets.
pub fn ridge_fit<T: Scalar>(x: ArrayView2<'_, T>, y_pm: &[T], cfg: &RidgeConfig<T>) -> Result<RidgeModel<T>> {
    cfg.validate()?;
    let problem = RidgeProblem::new(x, y_pm, cfg.lambda)?;
    let beta = match cfg.solver {
        RidgeSolver::ClosedForm => problem.solve_closed_form()?,
        RidgeSolver::Gradient => problem.solve_gradient(cfg),
    };
    Ok(RidgeModel {
        lambda: cfg.lambda,
        intercept: problem.intercept(&beta),
        beta: beta.to_vec(),
        feature_names: Vec::new(),
    })
}

/// Scores and thresholded labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgePrediction<T> {
    pub scores: Vec<T>,
    pub labels: Vec<Label>,
}

impl<T: Scalar> RidgeModel<T> {
    pub fn with_feature_names(mut self, names: Vec<String>) -> Self {
        self.feature_names = names;
        self
    }

    /// score = Xβ + intercept; a zero score is classified AD (+1).
    pub fn predict(&self, x: ArrayView2<'_, T>) -> Result<RidgePrediction<T>> {
        if x.ncols() != self.beta.len() {
            return Err(Error::DimensionMismatch {
                what: "ridge feature count",
                expected: self.beta.len(),
                got: x.ncols(),
            });
        }
        let beta = ArrayView1::from(&self.beta[..]);
        let scores: Vec<T> = x.dot(&beta).iter().map(|&s| s + self.intercept).collect();
        let labels = scores.iter().map(|&s| Label::from_score(s)).collect();
        Ok(RidgePrediction { scores, labels })
    }

    /// |βᵢ| in catalog order.
    pub fn importance(&self) -> Vec<T> {
        self.beta.iter().map(|b| b.abs()).collect()
    }
}
