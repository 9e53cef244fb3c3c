mod support;

use proptest::prelude::*;
use rand::Rng;
use support::*;
use tweetclass::corpus::{
    class_distribution, label_mapping, load_csv_bytes, map_labels, stratified_split, to_csv_string, SplitSpec,
};
use tweetclass::eval::{compute_report_indices, grid_search, make_folds, FoldSpec, GridSpec, Scoring};
use tweetclass::features::{NgramRange, Weighting};
use tweetclass::models::{Penalty, TrainConfig};
use tweetclass::pipeline::{ModelSpec, PipelineConfig};
use tweetclass::textprep::PrepConfig;

#[test]
fn report_equals_counting_oracle_exactly() {
    let mut r = rng(21);
    for _ in 0..200 {
        let k = r.gen_range(2..6);
        let n = r.gen_range(1..40);
        let truth: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
        let pred: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
        let got = compute_report_indices(&truth, &pred, &class_names(k)).unwrap();
        let want = oracle_report(&truth, &pred, k);
        for (c, m) in got.per_class.values().enumerate() {
            assert_eq!(m.precision, want.precision[c]);
            assert_eq!(m.recall, want.recall[c]);
            assert_eq!(m.f1, want.f1[c]);
            assert_eq!(m.support, want.support[c]);
        }
        assert_eq!(
            [got.macro_avg.precision, got.macro_avg.recall, got.macro_avg.f1],
            want.macro_avg
        );
        assert_eq!(
            [got.weighted.precision, got.weighted.recall, got.weighted.f1],
            want.weighted
        );
        assert_eq!(got.accuracy, want.accuracy);
        assert!((got.weighted.recall - got.accuracy).abs() <= 1e-9);
    }
}

#[test]
fn report_matches_frozen_sklearn_metrics() {
    let r: serde_json::Value = serde_json::from_str(include_str!("data/sklearn_reference.json")).unwrap();
    let ints = |k: &str| -> Vec<usize> {
        r[k].as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap() as usize)
            .collect()
    };
    let floats = |k: &str| -> Vec<f64> { r[k].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect() };
    let rep = compute_report_indices(&ints("metrics_truth"), &ints("metrics_pred"), &class_names(4)).unwrap();
    for (c, m) in rep.per_class.values().enumerate() {
        assert!((m.precision - floats("precision")[c]).abs() < 1e-12);
        assert!((m.recall - floats("recall")[c]).abs() < 1e-12);
        assert!((m.f1 - floats("f1")[c]).abs() < 1e-12);
        assert_eq!(m.support, ints("support")[c] as u64);
    }
    let mac = floats("macro");
    let w = floats("weighted");
    assert!((rep.macro_avg.f1 - mac[2]).abs() < 1e-12 && (rep.macro_avg.precision - mac[0]).abs() < 1e-12);
    assert!((rep.weighted.f1 - w[2]).abs() < 1e-12 && (rep.weighted.recall - w[1]).abs() < 1e-12);
    assert!((rep.accuracy - r["accuracy"].as_f64().unwrap()).abs() < 1e-12);
    assert!(!rep.zero_division_flags.is_empty());
}

proptest! {
    #[test]
    fn macro_f1_invariant_under_relabeling(
        pairs in prop::collection::vec((0usize..4, 0usize..4), 1..60),
        perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
    ) {
        let truth: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let pred: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let a = compute_report_indices(&truth, &pred, &class_names(4)).unwrap();
        let pt: Vec<usize> = truth.iter().map(|&c| perm[c]).collect();
        let pp: Vec<usize> = pred.iter().map(|&c| perm[c]).collect();
        let b = compute_report_indices(&pt, &pp, &class_names(4)).unwrap();
        prop_assert!((a.macro_avg.f1 - b.macro_avg.f1).abs() < 1e-12);
        prop_assert!((a.weighted.f1 - b.weighted.f1).abs() < 1e-12);
        prop_assert_eq!(a.accuracy, b.accuracy);
    }

    #[test]
    fn split_partitions_ids_and_keeps_proportions(seed in 0u64..1000, per_class in 5usize..30, frac in 0.1f64..0.5) {
        let ds = synthetic_dataset(seed, &["x", "y", "z"], per_class, 0.5);
        let (train, holdout) = stratified_split(&ds, &SplitSpec::new(frac, seed).unwrap()).unwrap();
        let mut ids: Vec<String> = train.documents().iter().chain(holdout.documents()).map(|d| d.id.clone()).collect();
        let mut all: Vec<String> = ds.documents().iter().map(|d| d.id.clone()).collect();
        ids.sort();
        all.sort();
        prop_assert_eq!(ids, all);
        let full = class_distribution(&ds).unwrap();
        let held = class_distribution(&holdout).unwrap();
        let h = holdout.len() as f64;
        for ((label, share), (n_k, h_k)) in full.iter().zip(ds.class_counts().into_iter().zip(holdout.class_counts())) {
            prop_assert!((h_k as f64 - frac * n_k as f64).abs() < 1.0, "{} {} {}", label, n_k, h_k);
            let diff = (share - held[label]).abs();
            prop_assert!(diff <= 1.5 / h + 1e-12, "{} {}", label, diff);
        }
    }

    #[test]
    fn folds_partition_indices(seed in 0u64..1000, n in 20usize..80, k in 2usize..6) {
        let mut r = rng(seed);
        let labels: Vec<usize> = (0..n).map(|i| if i < 2 * k { i % 2 } else { r.gen_range(0..2) }).collect();
        let folds = make_folds(&labels, &class_names(2), &FoldSpec::new(k, seed)).unwrap();
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }
}

#[test]
fn csv_round_trip_and_relabel_preserve_documents() {
    let ds = synthetic_dataset(3, &["Extremely Negative", "Negative", "Positive"], 6, 0.5);
    let text = to_csv_string(&ds);
    let back = load_csv_bytes(text.as_bytes(), "memory", ds.schema()).unwrap().dataset;
    assert_eq!(back.documents(), ds.documents());
    let merged = map_labels(
        &ds,
        &label_mapping([
            ("Extremely Negative", "Negative"),
            ("Negative", "Negative"),
            ("Positive", "Positive"),
        ]),
    )
    .unwrap();
    assert_eq!(merged.len(), ds.len());
    for (a, b) in merged.documents().iter().zip(ds.documents()) {
        assert_eq!(a.text.as_bytes(), b.text.as_bytes());
    }
    assert_eq!(merged.schema().labels(), ["Negative", "Positive"]);
}

fn base() -> PipelineConfig {
    PipelineConfig {
        prep: PrepConfig::raw(),
        ngram_range: NgramRange::UNIGRAMS,
        min_count: 1,
        weighting: Weighting::Counts,
        model: ModelSpec::LogReg(TrainConfig::new(Penalty::L2, 1.0)),
    }
}

/// Reversing every axis permutes rows but picks the same best point on a grid
/// whose means are distinct.
#[test]
fn grid_best_is_independent_of_axis_order() {
    let ds = synthetic_dataset(9, &["a", "b", "c"], 20, 0.12);
    let mut g = GridSpec::from_base(&base(), Scoring::MacroF1);
    g.c = vec![0.01, 0.3, 3.0];
    g.min_count = vec![1, 4];
    g.weighting = vec![Weighting::Counts, Weighting::Tfidf];
    let folds = FoldSpec::new(4, 1);
    let fwd = grid_search(&ds, &base(), &g, &folds).unwrap();
    let mut means: Vec<f64> = fwd.rows.iter().map(|r| r.mean).collect();
    means.sort_by(f64::total_cmp);
    means.dedup();
    assert_eq!(means.len(), fwd.rows.len(), "grid has ties; pick another seed");
    let mut rev = g.clone();
    rev.c.reverse();
    rev.min_count.reverse();
    rev.weighting.reverse();
    let bwd = grid_search(&ds, &base(), &rev, &folds).unwrap();
    assert_eq!(fwd.best_row().point, bwd.best_row().point);
    assert_eq!(fwd.best_row().mean, bwd.best_row().mean);
}

/// An l1 fit with a tiny C zeroes every weight and guesses one class.
#[test]
fn dominating_config_wins() {
    let ds = synthetic_dataset(2, &["a", "b"], 30, 0.2);
    let mut g = GridSpec::from_base(&base(), Scoring::Accuracy);
    g.penalty = vec![Penalty::L1];
    g.c = vec![1e-4, 1.0];
    let res = grid_search(&ds, &base(), &g, &FoldSpec::new(5, 3)).unwrap();
    assert_eq!(res.best_row().point.c, 1.0);
}
