//! Independent reference implementations and generators shared by the
//! integration tests. Everything here works on dense, plain data so it
//! shares no code paths with the library under test.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tweetclass::corpus::{ColumnMap, Document, LabelSchema, LabeledDataset};
use tweetclass::features::{FeatureMatrix, FeatureVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dense_to_matrix(rows: &[Vec<f64>]) -> FeatureMatrix<f64> {
    let width = rows.first().map_or(0, Vec::len);
    let sparse = rows
        .iter()
        .map(|r| FeatureVector::from_pairs(r.iter().copied().enumerate().collect()))
        .collect();
    FeatureMatrix::new(sparse, width).unwrap()
}

pub fn random_counts(rng: &mut ChaCha8Rng, n: usize, v: usize, max: u32) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..v).map(|_| f64::from(rng.gen_range(0..=max))).collect())
        .collect()
}

/// Labels covering every class at least once, then uniform.
pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect()
}

pub fn class_names(k: usize) -> Vec<String> {
    (0..k).map(|c| format!("c{c}")).collect()
}

/// Per-class precision, recall, F1, support, then macro and weighted
/// (precision, recall, F1) and accuracy, all by direct counting.
pub struct OracleReport {
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub support: Vec<u64>,
    pub macro_avg: [f64; 3],
    pub weighted: [f64; 3],
    pub accuracy: f64,
}

pub fn oracle_report(truth: &[usize], pred: &[usize], k: usize) -> OracleReport {
    let mut precision = Vec::new();
    let mut recall = Vec::new();
    let mut f1 = Vec::new();
    let mut support = Vec::new();
    for c in 0..k {
        let mut tp = 0u64;
        let mut fp = 0u64;
        let mut fneg = 0u64;
        for (&t, &p) in truth.iter().zip(pred) {
            match (t == c, p == c) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fneg += 1,
                _ => {}
            }
        }
        let p = if tp + fp == 0 {
            0.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let r = if tp + fneg == 0 {
            0.0
        } else {
            tp as f64 / (tp + fneg) as f64
        };
        let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        precision.push(p);
        recall.push(r);
        f1.push(f);
        support.push(tp + fneg);
    }
    let n = truth.len() as f64;
    let kf = k as f64;
    let macro_avg = [
        precision.iter().sum::<f64>() / kf,
        recall.iter().sum::<f64>() / kf,
        f1.iter().sum::<f64>() / kf,
    ];
    let w = |v: &[f64]| v.iter().zip(&support).map(|(x, &s)| x * s as f64).sum::<f64>() / n;
    let weighted = [w(&precision), w(&recall), w(&f1)];
    let accuracy = truth.iter().zip(pred).filter(|(t, p)| t == p).count() as f64 / n;
    OracleReport {
        precision,
        recall,
        f1,
        support,
        macro_avg,
        weighted,
        accuracy,
    }
}

/// Unnormalized log posterior of every class for `query` under a
/// Laplace-smoothed multinomial model, computed by multiplying per-token
/// probabilities over the expanded token sequence.
pub fn brute_force_mnb(docs: &[Vec<f64>], y: &[usize], k: usize, alpha: f64, query: &[f64]) -> Vec<f64> {
    let v = query.len();
    (0..k)
        .map(|c| {
            let members: Vec<&Vec<f64>> = docs.iter().zip(y).filter(|(_, &l)| l == c).map(|(d, _)| d).collect();
            let prior = members.len() as f64 / docs.len() as f64;
            let class_total: f64 = members.iter().map(|d| d.iter().sum::<f64>()).sum();
            let mut prob = prior;
            for (j, &times) in query.iter().enumerate() {
                let term_total: f64 = members.iter().map(|d| d[j]).sum();
                let pj = (term_total + alpha) / (class_total + alpha * v as f64);
                for _ in 0..times as usize {
                    prob *= pj;
                }
            }
            prob.ln()
        })
        .collect()
}

/// Objective `Σ c_y NLL + (1/C) R(W)` on dense data, parameters laid out as
/// K rows of V weights followed by K biases.
pub fn dense_objective(
    params: &[f64],
    x: &[Vec<f64>],
    y: &[usize],
    k: usize,
    class_weights: &[f64],
    l2: bool,
    c: f64,
) -> f64 {
    let v = x[0].len();
    let mut loss = 0.0;
    for (row, &yi) in x.iter().zip(y) {
        let scores: Vec<f64> = (0..k)
            .map(|cl| {
                row.iter()
                    .enumerate()
                    .map(|(j, xj)| params[cl * v + j] * xj)
                    .sum::<f64>()
                    + params[k * v + cl]
            })
            .collect();
        let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln();
        loss += class_weights[yi] * (lse - scores[yi]);
    }
    let w = &params[..k * v];
    loss + if l2 {
        0.5 / c * w.iter().map(|a| a * a).sum::<f64>()
    } else {
        w.iter().map(|a| a.abs()).sum::<f64>() / c
    }
}

pub fn schema(name: &str, labels: &[&str]) -> LabelSchema {
    let labels: Vec<String> = labels.iter().map(|s| (*s).to_owned()).collect();
    LabelSchema::new(
        name,
        labels.clone(),
        ColumnMap::new(Some("id"), "text", "label"),
        LabelSchema::identity_decoder(&labels),
    )
    .unwrap()
}

/// Documents whose words are drawn from a class-specific pool with
/// probability `signal`, otherwise from a shared pool.
pub fn synthetic_dataset(seed: u64, labels: &[&str], per_class: usize, signal: f64) -> LabeledDataset {
    synthetic_with_schema(seed, schema("synthetic", labels), per_class, signal)
}

/// As `synthetic_dataset`, over every label of `schema`.
pub fn synthetic_with_schema(seed: u64, schema: LabelSchema, per_class: usize, signal: f64) -> LabeledDataset {
    let labels: Vec<String> = schema.labels().to_vec();
    let mut r = rng(seed);
    let shared = ["the", "a", "is", "today", "people", "news", "again", "so"];
    let mut docs = Vec::new();
    for i in 0..per_class * labels.len() {
        let c = i % labels.len();
        let words: Vec<String> = (0..8)
            .map(|_| {
                if r.gen_bool(signal) {
                    let stem: String = labels[c].chars().filter(char::is_ascii_alphabetic).collect();
                    format!("{}{}", stem.to_lowercase(), r.gen_range(0..4))
                } else {
                    shared[r.gen_range(0..shared.len())].to_owned()
                }
            })
            .collect();
        docs.push(Document::new(i.to_string(), words.join(" "), labels[c].as_str()));
    }
    LabeledDataset::new(schema, docs).unwrap()
}

/// Writes small synthetic files with the real layouts of all three datasets.
pub fn write_data_dir(dir: &std::path::Path, seed: u64) {
    use tweetclass::app::{manifest, DatasetId};
    use tweetclass::corpus::write_csv;
    for (i, id) in DatasetId::ALL.into_iter().enumerate() {
        let m = manifest(id);
        let ds = synthetic_with_schema(seed + i as u64, m.schema.clone(), 40, 0.3);
        write_csv(&ds, dir.join(&m.train_files[0])).unwrap();
        if let Some(test) = &m.test_file {
            let mut out = String::from("id,keyword,location,text\n");
            for d in ds.documents().iter().take(25) {
                out.push_str(&format!("t{},,,{}\n", d.id, d.text));
            }
            std::fs::write(dir.join(test), out).unwrap();
        }
    }
}
