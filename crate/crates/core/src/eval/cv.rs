use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{compute_report_indices, EvalReport};
use crate::corpus::{LabeledDataset, DEFAULT_SEED};
use crate::pipeline::{fit_tokens, tokenize_dataset, FittedPipeline, PipelineConfig};
use crate::textprep::Token;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
}

impl FoldSpec {
    pub fn new(k: usize, seed: u64) -> Self {
        FoldSpec {
            k,
            seed,
            stratified: true,
        }
    }
}

impl Default for FoldSpec {
    fn default() -> Self {
        FoldSpec::new(10, DEFAULT_SEED)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scoring {
    Accuracy,
    MacroF1,
    #[default]
    WeightedF1,
}

impl Scoring {
    pub fn score(self, report: &EvalReport) -> f64 {
        match self {
            Scoring::Accuracy => report.accuracy,
            Scoring::MacroF1 => report.macro_avg.f1,
            Scoring::WeightedF1 => report.weighted.f1,
        }
    }
}

impl std::fmt::Display for Scoring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scoring::Accuracy => "accuracy",
            Scoring::MacroF1 => "macro_f1",
            Scoring::WeightedF1 => "weighted_f1",
        })
    }
}

/// Held-out index sets, each sorted ascending. Stratified folds shuffle each
/// class, then deal its members round-robin, continuing the fold counter
/// from one class to the next.
pub fn make_folds(labels: &[usize], class_names: &[String], spec: &FoldSpec) -> Result<Vec<Vec<usize>>> {
    let n = labels.len();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if spec.k < 2 || spec.k > n {
        return Err(Error::InvalidFolds(format!("k = {} with {n} documents", spec.k)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut folds = vec![Vec::new(); spec.k];
    if spec.stratified {
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); class_names.len()];
        for (i, &c) in labels.iter().enumerate() {
            if c >= class_names.len() {
                return Err(Error::UnknownLabel(c.to_string()));
            }
            members[c].push(i);
        }
        for (c, m) in members.iter().enumerate() {
            if !m.is_empty() && m.len() < spec.k {
                return Err(Error::ClassTooSmall {
                    label: class_names[c].clone(),
                    count: m.len(),
                    required: spec.k,
                });
            }
        }
        let mut next = 0;
        for m in &mut members {
            m.shuffle(&mut rng);
            for &i in m.iter() {
                folds[next].push(i);
                next = (next + 1) % spec.k;
            }
        }
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        for (pos, i) in all.into_iter().enumerate() {
            folds[pos % spec.k].push(i);
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Complement of `held` within `0..n`, ascending.
pub(crate) fn complement(held: &[usize], n: usize) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in held {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub scoring: Scoring,
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation of the fold scores.
    pub std: f64,
    pub reports: Vec<EvalReport>,
}

pub(crate) fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Cross-validates on documents already preprocessed with `config.prep`.
/// Vocabulary, idf, and model are refit on every training fold.
pub fn kfold_cv_tokens(
    tokens: &[Vec<Token>],
    labels: &[usize],
    classes: &[String],
    config: &PipelineConfig,
    folds: &FoldSpec,
    scoring: Scoring,
) -> Result<CvResult> {
    let fold_sets = make_folds(labels, classes, folds)?;
    let n = labels.len();
    let reports = fold_sets
        .par_iter()
        .map(|held| {
            let train = complement(held, n);
            let t: Vec<Vec<Token>> = train.iter().map(|&i| tokens[i].clone()).collect();
            let y: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
            let fitted: FittedPipeline<f64> = fit_tokens(&t, &y, classes, config)?;
            let pred: Vec<usize> = held.iter().map(|&i| fitted.predict_tokens(&tokens[i]).0).collect();
            let truth: Vec<usize> = held.iter().map(|&i| labels[i]).collect();
            compute_report_indices(&truth, &pred, classes)
        })
        .collect::<Result<Vec<_>>>()?;
    let fold_scores: Vec<f64> = reports.iter().map(|r| scoring.score(r)).collect();
    let (mean, std) = mean_std(&fold_scores);
    Ok(CvResult {
        scoring,
        fold_scores,
        mean,
        std,
        reports,
    })
}

pub fn kfold_cv(
    dataset: &LabeledDataset,
    config: &PipelineConfig,
    folds: &FoldSpec,
    scoring: Scoring,
) -> Result<CvResult> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let tokens = tokenize_dataset(dataset, &config.prep);
    kfold_cv_tokens(
        &tokens,
        &dataset.label_indices(),
        dataset.schema().labels(),
        config,
        folds,
        scoring,
    )
}
