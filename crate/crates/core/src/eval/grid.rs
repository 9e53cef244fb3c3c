use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cv::{kfold_cv_tokens, FoldSpec, Scoring};
use crate::corpus::LabeledDataset;
use crate::features::{NgramRange, Weighting};
use crate::models::{ClassWeights, Penalty};
use crate::pipeline::{tokenize_dataset, ModelSpec, PipelineConfig};
use crate::{Error, Result};

/// Axes of an exhaustive search. Points are enumerated with `penalty`
/// varying slowest and `weighting` fastest, in field order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub penalty: Vec<Penalty>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    pub class_weights: Vec<ClassWeights>,
    pub min_count: Vec<u64>,
    pub ngram_range: Vec<NgramRange>,
    pub remove_stopwords: Vec<bool>,
    pub weighting: Vec<Weighting>,
    pub scoring: Scoring,
}

/// Values of one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub penalty: Penalty,
    #[serde(rename = "C")]
    pub c: f64,
    pub class_weights: ClassWeights,
    pub min_count: u64,
    pub ngram_range: NgramRange,
    pub remove_stopwords: bool,
    pub weighting: Weighting,
}

impl GridSpec {
    /// Every axis fixed to the value in `base`.
    pub fn from_base(base: &PipelineConfig, scoring: Scoring) -> Self {
        let (penalty, c, cw) = match &base.model {
            ModelSpec::LogReg(t) => (t.penalty, t.c, t.class_weights.clone()),
            ModelSpec::Mnb { .. } => (Penalty::L2, 1.0, ClassWeights::None),
        };
        GridSpec {
            penalty: vec![penalty],
            c: vec![c],
            class_weights: vec![cw],
            min_count: vec![base.min_count],
            ngram_range: vec![base.ngram_range],
            remove_stopwords: vec![base.prep.remove_stopwords],
            weighting: vec![base.weighting],
            scoring,
        }
    }

    pub fn size(&self) -> usize {
        self.penalty.len()
            * self.c.len()
            * self.class_weights.len()
            * self.min_count.len()
            * self.ngram_range.len()
            * self.remove_stopwords.len()
            * self.weighting.len()
    }

    pub fn validate(&self, base: &PipelineConfig) -> Result<()> {
        let axes = [
            ("penalty", self.penalty.len()),
            ("C", self.c.len()),
            ("class_weights", self.class_weights.len()),
            ("min_count", self.min_count.len()),
            ("ngram_range", self.ngram_range.len()),
            ("remove_stopwords", self.remove_stopwords.len()),
            ("weighting", self.weighting.len()),
        ];
        if let Some((name, _)) = axes.iter().find(|a| a.1 == 0) {
            return Err(Error::InvalidGrid(format!("axis `{name}` is empty")));
        }
        if let Some(c) = self.c.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::InvalidGrid(format!("C must be positive, got {c}")));
        }
        if matches!(base.model, ModelSpec::Mnb { .. }) {
            if let Some((name, _)) = axes[..3].iter().find(|a| a.1 > 1) {
                return Err(Error::InvalidGrid(format!(
                    "axis `{name}` has several values but the base model is naive Bayes"
                )));
            }
        }
        Ok(())
    }

    /// All points in enumeration order.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.size());
        for &penalty in &self.penalty {
            for &c in &self.c {
                for cw in &self.class_weights {
                    for &min_count in &self.min_count {
                        for &ngram_range in &self.ngram_range {
                            for &remove_stopwords in &self.remove_stopwords {
                                for &weighting in &self.weighting {
                                    out.push(GridPoint {
                                        penalty,
                                        c,
                                        class_weights: cw.clone(),
                                        min_count,
                                        ngram_range,
                                        remove_stopwords,
                                        weighting,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl GridPoint {
    pub fn apply(&self, base: &PipelineConfig) -> PipelineConfig {
        let mut cfg = base.clone();
        cfg.min_count = self.min_count;
        cfg.ngram_range = self.ngram_range;
        cfg.prep.remove_stopwords = self.remove_stopwords;
        cfg.weighting = self.weighting;
        if let ModelSpec::LogReg(t) = &mut cfg.model {
            t.penalty = self.penalty;
            t.c = self.c;
            t.class_weights = self.class_weights.clone();
        }
        cfg
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub point: GridPoint,
    pub config: PipelineConfig,
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub scoring: Scoring,
    /// One row per point, in enumeration order.
    pub rows: Vec<GridRow>,
    /// Index into `rows` of the highest mean; the earliest wins ties.
    pub best: usize,
}

impl GridResult {
    pub fn best_row(&self) -> &GridRow {
        &self.rows[self.best]
    }

    pub fn render_table(&self) -> String {
        let mut out = format!(
            "{:>3}  {:<7}  {:>6}  {:<9}  {:>9}  {:<6}  {:<9}  {:<7}  {:>8}  {:>8}\n",
            "#", "penalty", "C", "weights", "min_count", "ngrams", "stopwords", "weight", "mean", "std"
        );
        for (i, r) in self.rows.iter().enumerate() {
            let p = &r.point;
            out.push_str(&format!(
                "{:>3}  {:<7}  {:>6}  {:<9}  {:>9}  {:<6}  {:<9}  {:<7}  {:>8.4}  {:>8.4}{}\n",
                i,
                p.penalty.to_string(),
                p.c,
                p.class_weights.to_string(),
                p.min_count,
                p.ngram_range.to_string(),
                if p.remove_stopwords { "removed" } else { "kept" },
                p.weighting.to_string(),
                r.mean,
                r.std,
                if i == self.best { "  *" } else { "" }
            ));
        }
        out
    }
}

/// Index of the first maximum.
pub(crate) fn first_argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Cross-validates every point and picks the highest mean score.
pub fn grid_search(
    dataset: &LabeledDataset,
    base: &PipelineConfig,
    grid: &GridSpec,
    folds: &FoldSpec,
) -> Result<GridResult> {
    grid.validate(base)?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let points = grid.points();
    let labels = dataset.label_indices();
    let classes = dataset.schema().labels();
    let mut token_cache = HashMap::new();
    for &stop in &grid.remove_stopwords {
        let mut prep = base.prep.clone();
        prep.remove_stopwords = stop;
        token_cache.insert(stop, tokenize_dataset(dataset, &prep));
    }
    let rows = points
        .into_par_iter()
        .map(|point| {
            let config = point.apply(base);
            let tokens = &token_cache[&point.remove_stopwords];
            let cv = kfold_cv_tokens(tokens, &labels, classes, &config, folds, grid.scoring)?;
            Ok(GridRow {
                point,
                config,
                fold_scores: cv.fold_scores,
                mean: cv.mean,
                std: cv.std,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let means: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    Ok(GridResult {
        scoring: grid.scoring,
        best: first_argmax(&means),
        rows,
    })
}
