mod common;

use acoustic_screen::dataset::{FeatureCatalog, Fingerprint, Label, LabeledDataset, SourceSet};
use acoustic_screen::evaluation::{
    grid_search, holdout_eval, loso, loso_nested, make_grid, sweep_feature_counts, ConfusionMatrix, RankingScope,
    SweepOptions, SweepSchedule,
};
use acoustic_screen::models::ModelId;
use acoustic_screen::selection::{ranking, run_protocol, ProtocolConfig};
use acoustic_screen::{Dataset, Spec};
use common::planted;
use ndarray::Array2;

fn dataset(x: Array2<f64>, labels: Vec<Label>) -> Dataset {
    let n = x.nrows();
    let catalog = FeatureCatalog::from_names((0..x.ncols()).map(|j| format!("f{j}")), SourceSet::Other).unwrap();
    LabeledDataset::new((0..n).map(|i| format!("s{i:02}")).collect(), x, labels, catalog).unwrap()
}

fn two_clusters() -> Dataset {
    let x = ndarray::array![
        [0.0, 0.1], [0.2, 0.0], [0.1, 0.3], [0.3, 0.2], [0.15, 0.15],
        [3.0, 3.1], [3.2, 2.9], [2.9, 3.0], [3.1, 3.3], [3.05, 2.95]
    ];
    let y = (0..10).map(|i| if i < 5 { Label::Control } else { Label::Ad }).collect();
    dataset(x, y)
}

#[test]
fn separated_clusters_score_perfectly_under_loso() {
    let ds = two_clusters();
    for spec in [Spec::default_for(ModelId::Emlm), Spec::default_for(ModelId::Ridge).with_hyperparam(1e-3)] {
        let r = loso(&ds, &spec, &[0, 1], RankingScope::Unranked).unwrap();
        assert_eq!(r.accuracy, 1.0, "{}", spec.id());
        assert_eq!(r.per_fold.len(), 10);
    }
}

#[test]
fn constant_classifier_arithmetic() {
    let truth: Vec<Label> = (0..108).map(|i| if i % 2 == 0 { Label::Control } else { Label::Ad }).collect();
    let all_ad = vec![Label::Ad; 108];
    let cm = ConfusionMatrix::from_predictions(&all_ad, &truth);
    assert_eq!(cm.accuracy(), 0.5);
    assert_eq!(cm.f1(), 2.0 / 3.0);
    assert_eq!((cm.tp, cm.fp, cm.tn, cm.fn_), (54, 54, 0, 0));
}

#[test]
fn hand_counted_confusion() {
    use Label::{Ad as A, Control as C};
    let truth = [A, A, A, C, C, C];
    let pred = [A, A, C, C, A, C];
    let cm = ConfusionMatrix::from_predictions(&pred, &truth);
    assert_eq!((cm.tp, cm.fp, cm.tn, cm.fn_), (2, 1, 2, 1));
    assert_eq!(cm.accuracy(), 4.0 / 6.0);
    assert_eq!(cm.f1(), 4.0 / 6.0);
}

#[test]
fn loso_on_108_subjects_has_108_folds_without_leakage() {
    let ds = planted(108, 20, 3, 7);
    let r = loso(&ds, &Spec::default_for(ModelId::Ridge), &[0, 1, 2], RankingScope::InPool).unwrap();
    assert_eq!(r.per_fold.len(), 108);
    let all = Fingerprint::of(ds.subjects());
    for (i, f) in r.per_fold.iter().enumerate() {
        assert_eq!(f.held_out, vec![ds.subjects()[i].clone()]);
        let rest: Vec<&String> = ds.subjects().iter().filter(|s| **s != f.held_out[0]).collect();
        assert_eq!(f.normalization_fingerprint, Fingerprint::of(&rest));
        assert_ne!(f.normalization_fingerprint, all);
    }
    let c = &r.confusion;
    assert_eq!(c.total(), 108);
    assert_eq!(r.accuracy, c.accuracy());
    assert_eq!(r.f1, c.f1());
}

#[test]
fn holdout_resubstitution_and_catalog_check() {
    let ds = two_clusters();
    let r = holdout_eval(&ds, &ds, &Spec::default_for(ModelId::Emlm), &[0, 1], RankingScope::Unranked).unwrap();
    assert_eq!(r.accuracy, 1.0);
    let other = ds.select_features(&[1, 0]);
    assert!(holdout_eval(&ds, &other, &Spec::default_for(ModelId::Emlm), &[0], RankingScope::Unranked).is_err());
}

#[test]
fn grid_is_half_decades() {
    let g = make_grid::<f64>();
    assert_eq!(g.len(), 13);
    assert_eq!((g[0], g[6], g[12]), (1e-3, 1.0, 1e3));
    for w in g.windows(2) {
        assert!((w[1] / w[0] - 10f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn grid_search_avoids_collapsing_regularization() {
    // Separable but imbalanced (18 AD, 12 Control): a very large λ shrinks β
    // until the intercept alone decides, predicting AD everywhere.
    let mut r = common::rng(40);
    let x = common::uniform_matrix(&mut r, 30, 3);
    let y: Vec<Label> = (0..30).map(|i| if i < 18 { Label::Ad } else { Label::Control }).collect();
    let mut x = x;
    for i in 0..30 {
        x[[i, 0]] += if i < 18 { 2.0 } else { -2.0 };
    }
    let ds = dataset(x, y);
    for id in [ModelId::Ridge, ModelId::Svm] {
        let g = grid_search(&ds, &Spec::default_for(id), 3).unwrap();
        assert!(g.grid.contains(&g.chosen));
        match id {
            ModelId::Ridge => assert!(g.chosen < 1e3, "{g:?}"),
            _ => assert!(g.chosen > 1e-3, "{g:?}"),
        }
        assert_eq!(g, grid_search(&ds, &Spec::default_for(id), 3).unwrap());
    }
    assert!(grid_search(&ds, &Spec::default_for(ModelId::Emlm), 3).is_err());
}

#[test]
fn grid_ties_go_to_stronger_regularization() {
    let ds = planted(40, 2, 2, 1);
    let mut x = ds.x().to_owned();
    for (i, l) in ds.labels().iter().enumerate() {
        x[[i, 0]] = if *l == Label::Ad { 10.0 } else { -10.0 } + 0.01 * i as f64;
    }
    let ds = dataset(x, ds.labels().to_vec());
    let ridge = grid_search(&ds, &Spec::default_for(ModelId::Ridge), 0).unwrap();
    assert!(ridge.cv_scores.iter().all(|&s| s == 1.0));
    assert_eq!(ridge.chosen, 1e3);
    let svm = grid_search(&ds, &Spec::default_for(ModelId::Svm), 0).unwrap();
    if svm.cv_scores.iter().all(|&s| s == 1.0) {
        assert_eq!(svm.chosen, 1e-3);
    }
}

#[test]
fn sweep_on_planted_data_peaks_after_the_planted_set() {
    let ds = planted(60, 40, 5, 8);
    let spec = Spec::default_for(ModelId::Ridge);
    let ledger = run_protocol(&ds, &spec, 2, &ProtocolConfig { repeats: 10, folds: 5 }).unwrap();
    let mut top5 = ranking(&ledger)[..5].to_vec();
    top5.sort_unstable();
    assert_eq!(top5, vec![0, 1, 2, 3, 4]);
    let schedule = SweepSchedule { dense_until: 10, step: 5, k_max: 30 };
    let opts = SweepOptions { schedule, regrid_per_k: true, grid_seed: 1 };
    let curve = sweep_feature_counts(&ds, Some(&ds), &spec, &ledger, &opts).unwrap();
    assert_eq!(curve.points.len(), schedule.counts(40).len());
    assert_eq!(curve.points.iter().map(|p| p.k).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 25, 30]);
    let (best_k, _) = curve.best_loso;
    assert!(best_k >= 5, "{:?}", curve.best_loso);
    assert!(curve.points.iter().all(|p| p.holdout_accuracy.is_some()));
}

#[test]
fn nested_loso_reranks_inside_every_fold() {
    let ds = planted(24, 12, 2, 9);
    let spec = Spec::default_for(ModelId::Ridge);
    let cfg = ProtocolConfig { repeats: 3, folds: 5 };
    let r = loso_nested(&ds, &spec, 3, &cfg, 5).unwrap();
    assert_eq!(r.ranking_scope, RankingScope::Nested);
    assert_eq!(r.per_fold.len(), 24);
    for (i, f) in r.per_fold.iter().enumerate() {
        let train: Vec<usize> = (0..24).filter(|&j| j != i).collect();
        let expected = run_protocol(&ds.select_rows(&train), &spec, 5, &cfg).unwrap();
        assert_eq!(f.features.as_deref(), Some(&ranking(&expected)[..3]));
        assert!(!f.normalization_fingerprint.as_str().is_empty());
        assert_ne!(f.normalization_fingerprint, Fingerprint::of(ds.subjects()));
    }
}
