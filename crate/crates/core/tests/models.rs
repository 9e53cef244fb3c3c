mod support;

use proptest::prelude::*;
use rand::Rng;
use serde_json::Value;
use support::*;
use tweetclass::features::{apply_tfidf, build_vocabulary, fit_idf, vectorize_counts, FeatureVector, NgramRange};
use tweetclass::models::{
    loss_and_gradient, predict_logreg, predict_mnb, train_logreg, train_mnb, ClassWeights, Init, Penalty, TrainConfig,
};
use tweetclass::textprep::Token;
use tweetclass::{softmax, LogRegModel64};

fn reference() -> Value {
    serde_json::from_str(include_str!("data/sklearn_reference.json")).unwrap()
}

fn matrix_of(v: &Value) -> Vec<Vec<f64>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
        .collect()
}

fn vec_of(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn tfidf_matches_frozen_sklearn_output() {
    let r = reference();
    let x = dense_to_matrix(&matrix_of(&r["counts"]));
    let idf = fit_idf(&x);
    for (a, b) in idf.idf().iter().zip(vec_of(&r["idf"])) {
        assert!(close(*a, b, 1e-12), "{a} vs {b}");
    }
    for (row, want) in x.rows().iter().zip(matrix_of(&r["tfidf"])) {
        let got = apply_tfidf(row, &idf);
        for (j, w) in want.iter().enumerate() {
            assert!(close(got.get(j), *w, 1e-12), "{} vs {w}", got.get(j));
        }
    }
}

#[test]
fn mnb_matches_frozen_sklearn_output() {
    let r = reference();
    let x = dense_to_matrix(&matrix_of(&r["counts"]));
    let y: Vec<usize> = vec_of(&r["y"]).into_iter().map(|v| v as usize).collect();
    let m = train_mnb(&x, &y, &class_names(3), 1.0).unwrap();
    for (a, b) in m.log_prior().iter().zip(vec_of(&r["mnb_log_prior"])) {
        assert!(close(*a, b, 1e-12));
    }
    for (row, want) in m.log_prob().iter().zip(matrix_of(&r["mnb_log_prob"])) {
        for (a, b) in row.iter().zip(want) {
            assert!(close(*a, b, 1e-12));
        }
    }
    for (row, want) in x.rows().iter().zip(matrix_of(&r["mnb_log_posterior"])) {
        let (_, scores) = predict_mnb(&m, row);
        let post: Vec<f64> = softmax(&scores).iter().map(|p| p.ln()).collect();
        for (a, b) in post.iter().zip(want) {
            assert!(close(*a, b, 1e-9), "{a} vs {b}");
        }
    }
}

#[test]
fn logreg_matches_frozen_sklearn_output() {
    let r = reference();
    let x = dense_to_matrix(&matrix_of(&r["counts"]));
    let y: Vec<usize> = vec_of(&r["y"]).into_iter().map(|v| v as usize).collect();
    let mut cfg = TrainConfig::new(Penalty::L2, r["lr_C"].as_f64().unwrap());
    cfg.tolerance = 1e-10;
    let m = train_logreg(&x, &y, &class_names(3), &cfg).unwrap();
    assert!(m.diagnostics().converged);
    let coef = matrix_of(&r["lr_coef"]);
    for (k, want) in coef.iter().enumerate() {
        for (a, b) in m.weight_row(k).iter().zip(want) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
    }
    for (a, b) in m.bias().iter().zip(vec_of(&r["lr_intercept"])) {
        assert!((a - b).abs() < 1e-5, "{a} vs {b}");
    }
    for (row, want) in x.rows().iter().zip(matrix_of(&r["lr_proba"])) {
        let (_, p) = predict_logreg(&m, row);
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}

#[test]
fn mnb_brute_force_equivalence_exhaustive_small() {
    let mut r = rng(11);
    for case in 0..300 {
        let v = 1 + case % 5;
        let n = 2 + case % 7;
        let k = 2 + case % 2;
        if n < k {
            continue;
        }
        let docs = random_counts(&mut r, n, v, 3);
        let y = random_labels(&mut r, n, k);
        let alpha = [0.5, 1.0, 2.0][case % 3];
        let m = train_mnb(&dense_to_matrix(&docs), &y, &class_names(k), alpha).unwrap();
        m.check_normalized(1e-12).unwrap();
        for q in random_counts(&mut r, 4, v, 3) {
            let (label, scores) = predict_mnb(&m, &FeatureVector::from_pairs(q.iter().copied().enumerate().collect()));
            let oracle = brute_force_mnb(&docs, &y, k, alpha, &q);
            for (a, b) in scores.iter().zip(&oracle) {
                assert!(close(*a, *b, 1e-10), "case {case}: {a} vs {b}");
            }
            let best = oracle.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(close(oracle[label], best, 1e-10));
        }
    }
}

#[test]
fn gradient_matches_central_differences() {
    let mut r = rng(5);
    let mut worst = 0.0f64;
    for case in 0..120 {
        let n = 3 + case % 6;
        let v = 1 + case % 4;
        let k = 2 + case % 3;
        let dense: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..v).map(|_| r.gen_range(-2.0..2.0)).collect())
            .collect();
        let x = dense_to_matrix(&dense);
        let y = random_labels(&mut r, n, k);
        let penalty = [Penalty::None, Penalty::L2][case % 2];
        let mut cfg = TrainConfig::new(penalty, r.gen_range(0.2..3.0));
        if case % 3 == 0 {
            cfg.class_weights = ClassWeights::Balanced;
        }
        let params: Vec<f64> = (0..k * (v + 1)).map(|_| r.gen_range(-1.0..1.0)).collect();
        let (loss, grad) = loss_and_gradient(&params, &x, &y, k, &cfg).unwrap();
        let cw = cfg
            .class_weights
            .resolve(&class_names(k), &count_labels(&y, k))
            .unwrap();
        let f = |p: &[f64]| match penalty {
            Penalty::None => dense_objective(p, &dense, &y, k, &cw, true, f64::INFINITY),
            _ => dense_objective(p, &dense, &y, k, &cw, true, cfg.c),
        };
        assert!(close(loss, f(&params), 1e-12), "loss {loss} vs {}", f(&params));
        let h = 1e-5;
        for i in 0..params.len() {
            let mut up = params.clone();
            let mut dn = params.clone();
            up[i] += h;
            dn[i] -= h;
            let fd = (f(&up) - f(&dn)) / (2.0 * h);
            let rel = (grad[i] - fd).abs() / grad[i].abs().max(fd.abs()).max(1.0);
            worst = worst.max(rel);
        }
    }
    assert!(worst <= 1e-5, "worst relative error {worst}");
}

fn count_labels(y: &[usize], k: usize) -> Vec<usize> {
    let mut c = vec![0; k];
    for &l in y {
        c[l] += 1;
    }
    c
}

fn toy_problem(seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut r = rng(seed);
    let n = 40;
    let y = random_labels(&mut r, n, 3);
    let x = y
        .iter()
        .map(|&c| {
            (0..6)
                .map(|j| f64::from(r.gen_range(0..3u32)) + if j / 2 == c { 2.0 } else { 0.0 })
                .collect()
        })
        .collect();
    (x, y)
}

#[test]
fn two_random_starts_reach_the_same_optimum() {
    let (dense, y) = toy_problem(3);
    let x = dense_to_matrix(&dense);
    let mut losses = Vec::new();
    let mut preds = Vec::new();
    for seed in [1, 2] {
        let mut cfg = TrainConfig::new(Penalty::L2, 0.7);
        cfg.seed = seed;
        cfg.init = Init::Random { scale: 1.0 };
        let m = train_logreg(&x, &y, &class_names(3), &cfg).unwrap();
        assert!(m.diagnostics().converged, "{:?}", m.diagnostics());
        losses.push(m.diagnostics().loss);
        preds.push(x.rows().iter().map(|r| predict_logreg(&m, r).0).collect::<Vec<_>>());
    }
    assert!((losses[0] - losses[1]).abs() <= 1e-6, "{losses:?}");
    assert_eq!(preds[0], preds[1]);
}

#[test]
fn l2_weight_norm_shrinks_as_regularization_grows() {
    let (dense, y) = toy_problem(4);
    let x = dense_to_matrix(&dense);
    let norms: Vec<f64> = [10.0, 3.0, 1.0, 0.5, 0.31, 0.1, 0.01]
        .iter()
        .map(|&c| {
            let mut cfg = TrainConfig::new(Penalty::L2, c);
            cfg.tolerance = 1e-10;
            train_logreg(&x, &y, &class_names(3), &cfg).unwrap().weight_norm()
        })
        .collect();
    for w in norms.windows(2) {
        assert!(w[1] <= w[0] + 1e-8, "{norms:?}");
    }
}

#[test]
fn strong_l2_limit_recovers_class_priors() {
    let (dense, y) = toy_problem(6);
    let x = dense_to_matrix(&dense);
    let mut cfg = TrainConfig::new(Penalty::L2, 1e-7);
    cfg.tolerance = 1e-10;
    let m: LogRegModel64 = train_logreg(&x, &y, &class_names(3), &cfg).unwrap();
    assert!(m.weight_norm() < 1e-4);
    let counts = count_labels(&y, 3);
    let p = softmax(m.bias());
    for (pk, ck) in p.iter().zip(counts) {
        assert!((pk - ck as f64 / y.len() as f64).abs() < 1e-4);
    }
}

/// 20 points, 16 of class 0 and 4 of class 1, overlapping on one feature.
#[test]
fn class_weight_raises_minority_recall() {
    let xs = [
        0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 2.0, 1.0, 1.4, 1.9, 2.4,
    ];
    let y: Vec<usize> = (0..20).map(|i| usize::from(i >= 16)).collect();
    let dense: Vec<Vec<f64>> = xs.iter().map(|&v| vec![v]).collect();
    let x = dense_to_matrix(&dense);
    let recall = |w: ClassWeights| {
        let cfg = TrainConfig::new(Penalty::L2, 1.0).with_class_weights(w);
        let m = train_logreg(&x, &y, &class_names(2), &cfg).unwrap();
        let hits = (16..20).filter(|&i| predict_logreg(&m, &x.rows()[i]).0 == 1).count();
        hits as f64 / 4.0
    };
    let base = recall(ClassWeights::None);
    let doubled = recall(ClassWeights::Explicit(vec![("c0".into(), 1.0), ("c1".into(), 2.0)]));
    assert!(doubled > base, "{base} -> {doubled}");
}

#[test]
fn l1_produces_sparser_weights_than_l2() {
    let (dense, y) = toy_problem(8);
    let x = dense_to_matrix(&dense);
    let zeros = |p| {
        let m = train_logreg(&x, &y, &class_names(3), &TrainConfig::new(p, 0.05)).unwrap();
        m.weights().iter().filter(|w| **w == 0.0).count()
    };
    assert!(zeros(Penalty::L1) > zeros(Penalty::L2));
}

fn token_docs() -> impl Strategy<Value = Vec<Vec<Token>>> {
    let word = prop::sample::select(vec!["a", "b", "c", "d", "e", "f", "g"]);
    prop::collection::vec(prop::collection::vec(word, 0..9), 1..12).prop_map(|docs| {
        docs.into_iter()
            .map(|d| d.into_iter().map(|w| Token::new(w).unwrap()).collect())
            .collect()
    })
}

proptest! {
    #[test]
    fn tfidf_rows_have_unit_or_zero_norm(docs in token_docs()) {
        let Ok(vocab) = build_vocabulary(&docs, NgramRange::UNI_BI, 1) else { return Ok(()) };
        let rows: Vec<FeatureVector<f64>> = docs.iter().map(|d| vectorize_counts(d, &vocab)).collect();
        let m = tweetclass::features::FeatureMatrix::new(rows, vocab.len()).unwrap();
        let idf = fit_idf(&m);
        for r in m.rows() {
            let n = apply_tfidf(r, &idf).l2_norm();
            prop_assert!(n.abs() < 1e-9 || (n - 1.0).abs() < 1e-9, "{}", n);
        }
    }

    #[test]
    fn raising_min_count_never_adds_terms(docs in token_docs(), k in 1u64..5) {
        let lo = build_vocabulary(&docs, NgramRange::UNI_BI, k);
        let hi = build_vocabulary(&docs, NgramRange::UNI_BI, k + 1);
        if let Ok(hi) = hi {
            let lo = lo.unwrap();
            for t in hi.terms() {
                prop_assert!(lo.index_of(t).is_some());
            }
        }
    }

    #[test]
    fn count_weights_sum_to_matched_ngrams(docs in token_docs()) {
        let Ok(vocab) = build_vocabulary(&docs, NgramRange::new(1, 3).unwrap(), 2) else { return Ok(()) };
        for d in &docs {
            let v: FeatureVector<f64> = vectorize_counts(d, &vocab);
            let expected = tweetclass::features::extract_ngrams(d, NgramRange::new(1, 3).unwrap())
                .iter()
                .filter(|g| vocab.index_of(g).is_some())
                .count();
            prop_assert_eq!(v.sum(), expected as f64);
            prop_assert!(v.iter().all(|(_, w)| w.fract() == 0.0 && w > 0.0));
        }
    }

    #[test]
    fn softmax_sums_to_one_and_ignores_shifts(s in prop::collection::vec(-50.0f64..50.0, 1..8), shift in -1e3f64..1e3) {
        let p = softmax(&s);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let shifted: Vec<f64> = s.iter().map(|v| v + shift).collect();
        for (a, b) in p.iter().zip(softmax(&shifted)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
