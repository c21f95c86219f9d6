mod common;

use acoustic_screen::dataset::Label;
use acoustic_screen::models::{svm_fit, svm_objective, svm_subgradient, SvmConfig, SvmSolver};
use common::{pm_labels, rel_err, rng, uniform_matrix};
use ndarray::Array2;

/// 20 points in a 2-d subspace of R⁴: columns (u₁, u₂, u₁ + u₂, u₁ − 2u₂).
fn subspace_instance() -> (Array2<f64>, Vec<f64>) {
    let u = [
        -1.41, -0.414, -0.669, -0.931, -0.541, -0.782, 1.71, -0.541, -0.478, -0.758, 1.391, -0.703, 1.413, -0.927,
        -1.904, -0.817, -0.445, -1.789, -1.041, -0.272, 0.501, 1.144, 1.321, 0.601, 1.45, 1.208, -1.646, 1.917,
        -0.586, -0.874, 1.137, -0.22, 1.164, -0.933, 1.262, -0.996, 0.912, 0.055, -1.038, -0.115,
    ];
    let y = vec![
        -1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0, -1.0,
    ];
    let x = Array2::from_shape_fn((20, 4), |(i, j)| {
        let (a, b) = (u[2 * i], u[2 * i + 1]);
        match j {
            0 => a,
            1 => b,
            2 => a + b,
            _ => a - 2.0 * b,
        }
    });
    (x, y)
}

// Optimal objectives of the same instance from an exact QP solve (cvxpy),
// and the best value of a 161×161×81 grid over the two effective
// coordinates of w and b at C = 1.
const QP_OPTIMUM: [(f64, f64); 3] = [(0.1, 0.28968167572604964), (1.0, 0.32472477149651274), (10.0, 0.32472488263422866)];
const GRID_OPTIMUM_C1: f64 = 0.3612499999999997;

#[test]
fn objective_within_five_percent_of_oracle() {
    let (x, y) = subspace_instance();
    for (c, opt) in QP_OPTIMUM {
        let m = svm_fit(x.view(), &y, &SvmConfig::with_c(c)).unwrap();
        let obj = svm_objective(&m.w, m.b, x.view(), &y, c).unwrap();
        assert!(obj <= 1.05 * opt && obj >= opt * (1.0 - 1e-6), "C={c}: {obj} vs {opt}");
    }
    let m = svm_fit(x.view(), &y, &SvmConfig::with_c(1.0)).unwrap();
    let obj = svm_objective(&m.w, m.b, x.view(), &y, 1.0).unwrap();
    assert!(obj <= 1.05 * GRID_OPTIMUM_C1);
}

#[test]
fn subgradient_solver_never_worse_than_zero_model() {
    let (x, y) = subspace_instance();
    for c in [1e-3, 0.1, 1.0, 10.0, 1e3] {
        let m = svm_fit(x.view(), &y, &SvmConfig::subgradient(c)).unwrap();
        let obj = svm_objective(&m.w, m.b, x.view(), &y, c).unwrap();
        assert!(obj <= c * 20.0, "C={c}: {obj}");
    }
}

#[test]
fn smo_beats_long_subgradient_runs() {
    let mut r = rng(20);
    for case in 0..10 {
        let x = uniform_matrix(&mut r, 30, 6);
        let y = pm_labels(&mut r, 30);
        let c = [0.1, 1.0, 10.0][case % 3];
        let smo = svm_fit(x.view(), &y, &SvmConfig::with_c(c)).unwrap();
        let sg = svm_fit(x.view(), &y, &SvmConfig { max_epochs: 20_000, ..SvmConfig::subgradient(c) }).unwrap();
        let a = svm_objective(&smo.w, smo.b, x.view(), &y, c).unwrap();
        let b = svm_objective(&sg.w, sg.b, x.view(), &y, c).unwrap();
        assert!(a <= b * (1.0 + 1e-6), "case {case}: smo {a} subgradient {b}");
    }
}

#[test]
fn one_dimensional_pair_is_separated() {
    let x = ndarray::array![[-2.0], [2.0]];
    for solver in [SvmSolver::Smo, SvmSolver::Subgradient] {
        let m = svm_fit(x.view(), &[-1.0, 1.0], &SvmConfig { solver, ..SvmConfig::with_c(1e3) }).unwrap();
        assert!(m.w[0] > 0.0, "{solver:?}");
        assert_eq!(m.predict(x.view()).unwrap(), vec![Label::Control, Label::Ad]);
    }
    // Brute force over (w, b): the optimum is w = 1/2, b = 0 with objective 1/8.
    let m = svm_fit(x.view(), &[-1.0f64, 1.0], &SvmConfig::with_c(1e3)).unwrap();
    assert!((m.w[0] - 0.5).abs() < 1e-6 && m.b.abs() < 1e-6);
}

#[test]
fn relabeling_negates_the_hyperplane() {
    let mut r = rng(21);
    let x = uniform_matrix(&mut r, 25, 5);
    let y = pm_labels(&mut r, 25);
    let neg: Vec<f64> = y.iter().map(|v| -v).collect();
    let a = svm_fit(x.view(), &y, &SvmConfig::with_c(2.0)).unwrap();
    let b = svm_fit(x.view(), &neg, &SvmConfig::with_c(2.0)).unwrap();
    let bw: Vec<f64> = b.w.iter().map(|v| -v).collect();
    assert!(rel_err(&bw, &a.w) < 1e-6);
    assert!((a.b + b.b).abs() < 1e-6);
}

#[test]
fn fits_are_bitwise_deterministic() {
    let mut r = rng(22);
    let x = uniform_matrix(&mut r, 40, 8);
    let y = pm_labels(&mut r, 40);
    for cfg in [SvmConfig::with_c(0.5), SvmConfig::subgradient(0.5)] {
        let a = svm_fit(x.view(), &y, &cfg).unwrap();
        let b = svm_fit(x.view(), &y, &cfg).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn objective_matches_naive_sum() {
    let mut r = rng(23);
    let x = uniform_matrix(&mut r, 8, 3);
    let y = pm_labels(&mut r, 8);
    let w = [0.4, -1.2, 0.7];
    let (b, c) = (0.15, 1.7);
    let mut naive = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    for i in 0..8 {
        let f = (0..3).map(|j| w[j] * x[[i, j]]).sum::<f64>() + b;
        naive += c * (1.0 - y[i] * f).max(0.0);
    }
    let got = svm_objective(&w, b, x.view(), &y, c).unwrap();
    assert!((got - naive).abs() < 1e-12);
}

#[test]
fn subgradient_is_the_gradient_away_from_kinks() {
    let mut r = rng(24);
    let h = 1e-6;
    let mut checked = 0;
    for _ in 0..200 {
        let x = uniform_matrix(&mut r, 10, 3);
        let y = pm_labels(&mut r, 10);
        let w: Vec<f64> = uniform_matrix(&mut r, 1, 3).iter().map(|v| v * 3.0).collect();
        let b = 0.2;
        // Skip points within 1e-3 of a hinge kink.
        let near_kink = (0..10).any(|i| {
            let f = (0..3).map(|j| w[j] * x[[i, j]]).sum::<f64>() + b;
            (1.0 - y[i] * f).abs() < 1e-3
        });
        if near_kink {
            continue;
        }
        let (gw, gb) = svm_subgradient(&w, b, x.view(), &y, 0.8).unwrap();
        let mut numeric = Vec::new();
        for j in 0..3 {
            let (mut hi, mut lo) = (w.clone(), w.clone());
            hi[j] += h;
            lo[j] -= h;
            let d = svm_objective(&hi, b, x.view(), &y, 0.8).unwrap() - svm_objective(&lo, b, x.view(), &y, 0.8).unwrap();
            numeric.push(d / (2.0 * h));
        }
        let db = svm_objective(&w, b + h, x.view(), &y, 0.8).unwrap() - svm_objective(&w, b - h, x.view(), &y, 0.8).unwrap();
        numeric.push(db / (2.0 * h));
        let mut analytic = gw.clone();
        analytic.push(gb);
        assert!(rel_err(&numeric, &analytic) < 1e-5);
        checked += 1;
    }
    assert!(checked >= 50, "only {checked} probes away from kinks");
}

#[test]
fn irrelevant_constant_feature_gets_no_weight() {
    let ds = common::planted(60, 4, 2, 3);
    let mut x = ds.x().to_owned();
    x.column_mut(3).fill(1.0);
    let y: Vec<f64> = ds.labels().iter().map(|l| l.signed()).collect();
    let m = svm_fit(x.view(), &y, &SvmConfig::with_c(1.0)).unwrap();
    let fi = m.importance();
    let max = fi.iter().cloned().fold(0.0, f64::max);
    assert!(fi[3] <= 0.05 * max, "{fi:?}");
}
