use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest number of non-zero differences for which the null distribution
/// is enumerated exactly; above it the normal approximation is used.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    #[default]
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedRankResult {
    /// min(W⁺, W⁻).
    pub w_statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Pairs with a non-zero difference.
    pub n_effective: usize,
    pub p_value: f64,
    pub method: TestMethod,
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks<T: Scalar>(values: &[T]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        start = end;
    }
    ranks
}

/// Median, averaging the two middle values for even lengths.
pub fn median<T: Scalar>(values: &[T]) -> T {
    assert!(!values.is_empty(), "median of empty slice");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / T::lit(2.0)
    }
}

/// Paired Wilcoxon signed-rank test of `a − b` against a zero median.
///
/// Zero differences are discarded and tied magnitudes receive average ranks.
/// With at most [`EXACT_MAX_N`] non-zero differences the p-value comes from
/// the exact permutation distribution of W⁺ (counted over all 2ⁿ sign
/// assignments by dynamic programming on doubled ranks); otherwise from the
/// normal approximation with tie and continuity corrections.
pub fn wilcoxon_signed_rank<T: Scalar>(a: &[T], b: &[T], sided: Sidedness) -> Result<SignedRankResult> {
    let Sidedness::TwoSided = sided;
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "paired samples",
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::InvalidParameter("signed-rank test needs at least one pair".into()));
    }
    let diffs: Vec<T> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x - y)
        .filter(|d| *d != T::zero())
        .collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::NonFinite("signed-rank differences"));
    }
    let n = diffs.len();
    if n == 0 {
        return Ok(SignedRankResult {
            w_statistic: 0.0,
            w_plus: 0.0,
            w_minus: 0.0,
            n_effective: 0,
            p_value: 1.0,
            method: TestMethod::Exact,
        });
    }
    let magnitudes: Vec<T> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes);
    let w_plus: f64 = ranks.iter().zip(&diffs).filter(|(_, d)| **d > T::zero()).map(|(r, _)| r).sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let w = w_plus.min(w_minus);

    let (p, method) = if n <= EXACT_MAX_N {
        (exact_two_sided(&ranks, w), TestMethod::Exact)
    } else {
        (normal_two_sided(&magnitudes, n, w), TestMethod::NormalApprox)
    };
    Ok(SignedRankResult {
        w_statistic: w,
        w_plus,
        w_minus,
        n_effective: n,
        p_value: p.clamp(0.0, 1.0),
        method,
    })
}

/// 2·P(W⁺ ≤ w) under the sign-flip null, capped at 1.
fn exact_two_sided(ranks: &[f64], w: f64) -> f64 {
    // Average ranks are multiples of ½, so doubled ranks are integers.
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    let mut counts = vec![0u64; max_sum + 1];
    counts[0] = 1;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let limit = (2.0 * w).round() as usize;
    let tail: u64 = counts[..=limit.min(max_sum)].iter().sum();
    let p = 2.0 * tail as f64 / (1u64 << ranks.len()) as f64;
    p.min(1.0)
}

fn normal_two_sided<T: Scalar>(magnitudes: &[T], n: usize, w: f64) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut sorted = magnitudes.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    // w ≤ mean; the continuity correction moves it half a unit towards the mean.
    let z = ((w - mean + 0.5) / var.sqrt()).min(0.0);
    (erfc(-z / std::f64::consts::SQRT_2)).min(1.0)
}
