mod common;

use acoustic_screen::stats::{permute_labels, wilcoxon_signed_rank, Sidedness, TestMethod};
use common::rng;
use rand::Rng;

/// Two-sided p by enumerating all 2ⁿ sign assignments of the ranks.
fn brute_force_p(d: &[f64]) -> f64 {
    let nz: Vec<f64> = d.iter().copied().filter(|v| *v != 0.0).collect();
    let ranks = acoustic_screen::stats::average_ranks(&nz.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let n = nz.len();
    let w_plus: f64 = nz.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let total: f64 = ranks.iter().sum();
    let observed = w_plus.min(total - w_plus);
    let mut at_most = 0u64;
    for mask in 0u64..(1 << n) {
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if s <= observed + 1e-9 {
            at_most += 1;
        }
    }
    (2.0 * at_most as f64 / (1u64 << n) as f64).min(1.0)
}

#[test]
fn exact_p_equals_enumeration() {
    let mut r = rng(30);
    for case in 0..200 {
        let n = 1 + case % 12;
        // Coarse values so that ties and zero differences occur.
        let a: Vec<f64> = (0..n).map(|_| r.random_range(-4i32..5) as f64 * 0.5).collect();
        let b: Vec<f64> = (0..n).map(|_| r.random_range(-4i32..5) as f64 * 0.5).collect();
        let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        if d.iter().all(|v| *v == 0.0) {
            continue;
        }
        let res = wilcoxon_signed_rank(&a, &b, Sidedness::TwoSided).unwrap();
        assert_eq!(res.method, TestMethod::Exact);
        let oracle = brute_force_p(&d);
        assert!((res.p_value - oracle).abs() < 1e-12, "case {case}: {} vs {oracle}", res.p_value);
    }
}

#[test]
fn six_positive_differences() {
    let res = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[0.0; 6], Sidedness::TwoSided).unwrap();
    assert_eq!(res.p_value, 0.03125);
    assert_eq!(res.w_statistic, 0.0);
}

// scipy.stats.wilcoxon(a, b, zero_method="wilcox", correction=True,
// method="approx") on the same 40 pairs: statistic 304.5, p 0.15804215721191373.
#[test]
fn normal_approximation_matches_reference() {
    let a = [
        -0.3, -0.5, 0.7, 2.2, -0.7, 1.5, 1.4, -0.8, 0.5, 0.8, -0.6, 1.4, 1.2, 2.0, 0.7, 1.2, 2.1, 0.5, -0.2, -1.2,
        0.6, -1.0, 1.4, 0.4, 1.1, 0.5, 1.5, -0.2, 0.4, 1.7, -1.0, 0.5, 1.3, -0.8, -0.4, -0.9, 1.5, 0.1, -0.0, -1.1,
    ];
    let b = [
        -1.1, 0.9, -0.2, -0.4, 0.8, -0.9, 1.6, -0.4, -0.5, -0.3, 0.0, 0.7, -0.7, -0.8, 0.0, 0.3, 0.9, -0.5, 1.0, -1.0,
        1.4, -1.1, -0.1, 0.2, 1.0, 1.5, 0.0, 1.9, -0.8, 0.3, -0.2, 0.6, -1.0, -1.1, 1.3, 1.1, 0.6, -0.7, 0.6, 0.4,
    ];
    let res = wilcoxon_signed_rank(&a, &b, Sidedness::TwoSided).unwrap();
    assert_eq!(res.method, TestMethod::NormalApprox);
    assert_eq!(res.n_effective, 40);
    assert_eq!(res.w_statistic, 304.5);
    // The two erfc implementations differ in the last ~5 digits.
    assert!((res.p_value - 0.15804215721191373).abs() < 1e-10, "{}", res.p_value);
}

#[test]
fn maximal_separation_rejects() {
    let res = wilcoxon_signed_rank(&[1.0; 100], &[0.0; 100], Sidedness::TwoSided).unwrap();
    assert_eq!(res.method, TestMethod::NormalApprox);
    assert!(res.p_value < 1e-15);
}

#[test]
fn label_permutations_are_permutations() {
    let y: Vec<usize> = (0..108).collect();
    for seed in 0..20 {
        let mut p = permute_labels(&y, seed);
        assert_eq!(p, permute_labels(&y, seed));
        p.sort_unstable();
        assert_eq!(p, y);
    }
    assert_ne!(permute_labels(&y, 1), permute_labels(&y, 2));
}
