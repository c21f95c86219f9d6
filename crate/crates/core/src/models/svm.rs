//! Linear soft-margin SVM for `½‖w‖² + C Σ max(0, 1 − yᵢ(w·xᵢ + b))`.
//!
//! Two solvers: SMO on the dual (default; exact up to a KKT tolerance) and
//! full-batch primal subgradient descent.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Objective values above this multiple of the zero-model objective (C·N)
/// are treated as divergence.
const DIVERGENCE_FACTOR: f64 = 1e12;

/// Floor for the second-order curvature term in SMO pair selection.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SvmSolver {
    /// Sequential minimal optimization with second-order working-set choice.
    #[default]
    Smo,
    Subgradient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", default)]
pub struct SvmConfig<T: Scalar> {
    #[serde(rename = "C")]
    pub c: T,
    pub solver: SvmSolver,
    /// Subgradient: initial step of ηₜ = eta0 / (1 + t); `None` means
    /// min(1, 1/(C·N)).
    pub eta0: Option<T>,
    /// Subgradient: epoch cap.
    pub max_epochs: usize,
    /// Subgradient: stop when the relative objective decrease over an epoch
    /// is below this.
    pub tol: T,
    /// SMO: stop when the maximal KKT violation is below this.
    pub kkt_tol: T,
    /// SMO: iteration cap.
    pub max_iters: usize,
}

impl<T: Scalar> Default for SvmConfig<T> {
    fn default() -> Self {
        Self {
            c: T::one(),
            solver: SvmSolver::Smo,
            eta0: None,
            max_epochs: 1000,
            tol: T::lit(1e-8),
            kkt_tol: T::lit(1e-6),
            max_iters: 10_000_000,
        }
    }
}

impl<T: Scalar> SvmConfig<T> {
    pub fn with_c(c: T) -> Self {
        Self {
            c,
            ..Self::default()
        }
    }

    pub fn subgradient(c: T) -> Self {
        Self {
            c,
            solver: SvmSolver::Subgradient,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SvmModel<T: Scalar> {
    #[serde(rename = "C")]
    pub c: T,
    pub w: Vec<T>,
    pub b: T,
}

fn check_shapes<T>(x: ArrayView2<'_, T>, w_len: usize, y_len: usize) -> Result<()> {
    if x.ncols() != w_len {
        return Err(Error::DimensionMismatch {
            what: "SVM feature count",
            expected: w_len,
            got: x.ncols(),
        });
    }
    if x.nrows() != y_len {
        return Err(Error::DimensionMismatch {
            what: "SVM labels",
            expected: x.nrows(),
            got: y_len,
        });
    }
    Ok(())
}

fn hinge_objective<T: Scalar>(w: ArrayView1<'_, T>, margins: &Array1<T>, y: &[T], c: T) -> T {
    let hinge: T = margins
        .iter()
        .zip(y)
        .map(|(&f, &yi)| (T::one() - yi * f).max(T::zero()))
        .sum();
    T::lit(0.5) * w.dot(&w) + c * hinge
}

/// `½‖w‖² + C Σ max(0, 1 − yᵢ(w·xᵢ + b))`.
pub fn svm_objective<T: Scalar>(w: &[T], b: T, x: ArrayView2<'_, T>, y_pm: &[T], c: T) -> Result<T> {
    check_shapes(x, w.len(), y_pm.len())?;
    let w = ArrayView1::from(w);
    let margins = x.dot(&w).mapv(|f| f + b);
    Ok(hinge_objective(w, &margins, y_pm, c))
}

/// Subgradient over the violating set `S = {i | 1 − yᵢ(w·xᵢ + b) > 0}`:
/// `(w − C Σ_S yᵢxᵢ, −C Σ_S yᵢ)`.
pub fn svm_subgradient<T: Scalar>(
    w: &[T],
    b: T,
    x: ArrayView2<'_, T>,
    y_pm: &[T],
    c: T,
) -> Result<(Vec<T>, T)> {
    check_shapes(x, w.len(), y_pm.len())?;
    let wv = ArrayView1::from(w);
    let margins = x.dot(&wv).mapv(|f| f + b);
    let (gw, gb) = subgradient_from_margins(wv, &margins, x, y_pm, c);
    Ok((gw.to_vec(), gb))
}

fn subgradient_from_margins<T: Scalar>(
    w: ArrayView1<'_, T>,
    margins: &Array1<T>,
    x: ArrayView2<'_, T>,
    y: &[T],
    c: T,
) -> (Array1<T>, T) {
    let coef: Array1<T> = margins
        .iter()
        .zip(y)
        .map(|(&f, &yi)| if T::one() - yi * f > T::zero() { yi } else { T::zero() })
        .collect();
    let mut gw = x.t().dot(&coef);
    gw.zip_mut_with(&w, |g, &wi| *g = wi - c * *g);
    let gb = -c * coef.sum();
    (gw, gb)
}

/// Fits from `w = 0, b = 0` with the configured solver.
pub fn svm_fit<T: Scalar>(x: ArrayView2<'_, T>, y_pm: &[T], cfg: &SvmConfig<T>) -> Result<SvmModel<T>> {
    check_shapes(x, x.ncols(), y_pm.len())?;
    if !(cfg.c > T::zero()) || !(cfg.c.is_finite()) {
        return Err(Error::InvalidParameter(format!("SVM needs finite C > 0, got {}", cfg.c)));
    }
    if y_pm.iter().any(|&v| v != T::one() && v != -T::one()) {
        return Err(Error::InvalidParameter("SVM labels must be ±1".into()));
    }
    if !(y_pm.iter().any(|&v| v > T::zero()) && y_pm.iter().any(|&v| v < T::zero())) {
        return Err(Error::InvalidParameter("SVM needs both classes present".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("SVM inputs"));
    }
    match cfg.solver {
        SvmSolver::Smo => smo_fit(x, y_pm, cfg),
        SvmSolver::Subgradient => subgradient_fit(x, y_pm, cfg),
    }
}

/// Dual SMO: `min ½αᵀQα − Σα` s.t. `0 ≤ α ≤ C`, `yᵀα = 0`, with
/// `Q = diag(y) X Xᵀ diag(y)`; pairs are chosen by maximal violation and
/// second-order gain.
fn smo_fit<T: Scalar>(x: ArrayView2<'_, T>, y: &[T], cfg: &SvmConfig<T>) -> Result<SvmModel<T>> {
    if !(cfg.kkt_tol > T::zero()) || cfg.max_iters == 0 {
        return Err(Error::InvalidParameter("SMO needs kkt_tol > 0 and max_iters > 0".into()));
    }
    let n = y.len();
    let c = cfg.c;
    let k: Array2<T> = x.dot(&x.t());
    let tau = T::lit(TAU);
    let mut alpha = vec![T::zero(); n];
    // Gradient of the dual objective, Qα − 1.
    let mut g = vec![-T::one(); n];
    let upper = |a: T| a >= c;
    let lower = |a: T| a <= T::zero();

    for _ in 0..cfg.max_iters {
        let mut gmax = T::neg_infinity();
        let mut i = usize::MAX;
        for t in 0..n {
            let can_up = if y[t] > T::zero() { !upper(alpha[t]) } else { !lower(alpha[t]) };
            if can_up && -y[t] * g[t] >= gmax {
                gmax = -y[t] * g[t];
                i = t;
            }
        }
        if i == usize::MAX {
            break;
        }
        let mut gmax2 = T::neg_infinity();
        let mut j = usize::MAX;
        let mut best = T::infinity();
        for t in 0..n {
            let can_down = if y[t] > T::zero() { !lower(alpha[t]) } else { !upper(alpha[t]) };
            if !can_down {
                continue;
            }
            let ytg = y[t] * g[t];
            if ytg >= gmax2 {
                gmax2 = ytg;
            }
            let diff = gmax + ytg;
            if diff > T::zero() {
                let quad = (k[[i, i]] + k[[t, t]] - T::lit(2.0) * k[[i, t]]).max(tau);
                let gain = -diff * diff / quad;
                if gain <= best {
                    best = gain;
                    j = t;
                }
            }
        }
        if gmax + gmax2 < cfg.kkt_tol || j == usize::MAX {
            break;
        }

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let quad = (k[[i, i]] + k[[j, j]] - T::lit(2.0) * k[[i, j]]).max(tau);
        if y[i] != y[j] {
            let delta = (-g[i] - g[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > T::zero() {
                if alpha[j] < T::zero() {
                    alpha[j] = T::zero();
                    alpha[i] = diff;
                }
            } else if alpha[i] < T::zero() {
                alpha[i] = T::zero();
                alpha[j] = -diff;
            }
            if diff > T::zero() {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (g[i] - g[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < T::zero() {
                alpha[j] = T::zero();
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < T::zero() {
                alpha[i] = T::zero();
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            g[t] += y[t] * (y[i] * k[[t, i]] * di + y[j] * k[[t, j]] * dj);
        }
    }

    // Offset from the free multipliers, else the midpoint of the feasible range.
    let (mut ub, mut lb) = (T::infinity(), T::neg_infinity());
    let (mut free, mut sum_free) = (0usize, T::zero());
    for t in 0..n {
        let ytg = y[t] * g[t];
        if upper(alpha[t]) {
            if y[t] < T::zero() { ub = ub.min(ytg) } else { lb = lb.max(ytg) }
        } else if lower(alpha[t]) {
            if y[t] > T::zero() { ub = ub.min(ytg) } else { lb = lb.max(ytg) }
        } else {
            free += 1;
            sum_free += ytg;
        }
    }
    let rho = if free > 0 { sum_free / T::lit(free as f64) } else { (ub + lb) / T::lit(2.0) };
    let coef: Array1<T> = alpha.iter().zip(y).map(|(&a, &yi)| a * yi).collect();
    let w = x.t().dot(&coef);
    Ok(SvmModel { c, w: w.to_vec(), b: -rho })
}

/// Full-batch subgradient descent from `w = 0, b = 0`; returns the iterate
/// with the lowest objective seen.
fn subgradient_fit<T: Scalar>(x: ArrayView2<'_, T>, y_pm: &[T], cfg: &SvmConfig<T>) -> Result<SvmModel<T>> {
    let n_features = x.ncols();
    let eta0 = cfg
        .eta0
        .unwrap_or_else(|| (T::one() / (cfg.c * T::lit(y_pm.len() as f64))).min(T::one()));
    if !(eta0 > T::zero()) || !(cfg.tol > T::zero()) || cfg.max_epochs == 0 {
        return Err(Error::InvalidParameter(
            "subgradient SVM needs eta0 > 0, tol > 0 and max_epochs > 0".into(),
        ));
    }

    let zero_objective = cfg.c * T::lit(y_pm.len() as f64);
    let limit = T::lit(DIVERGENCE_FACTOR) * zero_objective.max(T::one());
    let mut w = Array1::<T>::zeros(n_features);
    let mut b = T::zero();
    let mut best = (w.clone(), b, T::infinity());
    let mut previous = T::infinity();

    for t in 0..cfg.max_epochs {
        let margins = x.dot(&w).mapv(|f| f + b);
        let objective = hinge_objective(w.view(), &margins, y_pm, cfg.c);
        if !objective.is_finite() || objective > limit {
            return Err(Error::Divergence {
                objective: objective.as_f64(),
            });
        }
        if objective < best.2 {
            best = (w.clone(), b, objective);
        }
        let decrease = previous - objective;
        if decrease >= T::zero() && decrease < cfg.tol * previous {
            break;
        }
        previous = objective;

        let (gw, gb) = subgradient_from_margins(w.view(), &margins, x, y_pm, cfg.c);
        let eta = eta0 / (T::one() + T::lit(t as f64));
        w.scaled_add(-eta, &gw);
        b -= eta * gb;
    }
    // The final step is never scored inside the loop.
    let margins = x.dot(&w).mapv(|f| f + b);
    let objective = hinge_objective(w.view(), &margins, y_pm, cfg.c);
    if objective < best.2 {
        best = (w, b, objective);
    }
    Ok(SvmModel {
        c: cfg.c,
        w: best.0.to_vec(),
        b: best.1,
    })
}

impl<T: Scalar> SvmModel<T> {
    pub fn decision(&self, x: ArrayView2<'_, T>) -> Result<Vec<T>> {
        if x.ncols() != self.w.len() {
            return Err(Error::DimensionMismatch {
                what: "SVM feature count",
                expected: self.w.len(),
                got: x.ncols(),
            });
        }
        Ok(x.dot(&ArrayView1::from(&self.w[..])).iter().map(|&f| f + self.b).collect())
    }

    /// sign(w·x + b) with points on the hyperplane assigned to AD (+1).
    pub fn predict(&self, x: ArrayView2<'_, T>) -> Result<Vec<Label>> {
        Ok(self.decision(x)?.into_iter().map(Label::from_score).collect())
    }

    /// |wᵢ| in catalog order.
    pub fn importance(&self) -> Vec<T> {
        self.w.iter().map(|v| v.abs()).collect()
    }
}
