#![allow(dead_code)]

use acoustic_screen::cli::{generate_synthetic, SyntheticSpec};
use acoustic_screen::Dataset;
use ndarray::Array2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform entries in [-1, 1).
pub fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(-1.0..1.0))
}

/// ±1 labels with both signs present.
pub fn pm_labels(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut y: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    y[0] = 1.0;
    y[n - 1] = -1.0;
    y
}

pub fn planted(n_subjects: usize, n_features: usize, n_informative: usize, seed: u64) -> Dataset {
    generate_synthetic(&SyntheticSpec {
        n_subjects,
        n_features,
        n_informative,
        effect_size: 2.0,
        seed,
    })
    .unwrap()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / scale.max(1e-300)
}
