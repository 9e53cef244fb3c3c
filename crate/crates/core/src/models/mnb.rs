use serde::{Deserialize, Serialize};

use super::check_training_set;
use crate::features::{FeatureMatrix, FeatureVector};
use crate::{argmax, Error, Real, Result};

/// Multinomial naive Bayes with additive smoothing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MnbModel<T> {
    classes: Vec<String>,
    log_prior: Vec<T>,
    /// `K` rows of `V` term log-probabilities.
    log_prob: Vec<Vec<T>>,
    alpha: T,
}

impl<T: Real> MnbModel<T> {
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn log_prior(&self) -> &[T] {
        &self.log_prior
    }

    pub fn log_prob(&self) -> &[Vec<T>] {
        &self.log_prob
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn n_features(&self) -> usize {
        self.log_prob.first().map_or(0, Vec::len)
    }

    /// `log_prior[k] + Σ_j x_j log_prob[k][j]` for every class.
    pub fn scores(&self, x: &FeatureVector<T>) -> Vec<T> {
        self.log_prior
            .iter()
            .zip(&self.log_prob)
            .map(|(&p, lp)| p + x.dot(lp))
            .collect()
    }

    /// Checks `Σ_j exp(log_prob[k][j]) = 1` and `Σ_k exp(log_prior[k]) = 1`.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let sum_exp = |v: &[T]| v.iter().map(|l| l.as_f64().exp()).sum::<f64>();
        let prior = sum_exp(&self.log_prior);
        if (prior - 1.0).abs() > tol {
            return Err(Error::Shape(format!("class priors sum to {prior}")));
        }
        for (k, row) in self.log_prob.iter().enumerate() {
            let s = sum_exp(row);
            if (s - 1.0).abs() > tol {
                return Err(Error::Shape(format!("term distribution of class {k} sums to {s}")));
            }
        }
        Ok(())
    }
}

/// `log_prior[k] = ln(N_k / N)`, `log_prob[k][j] = ln((n_kj + α) / (n_k + αV))`.
pub fn train_mnb<T: Real>(x: &FeatureMatrix<T>, y: &[usize], classes: &[String], alpha: T) -> Result<MnbModel<T>> {
    if !(alpha.is_finite() && alpha > T::zero()) {
        return Err(Error::NonPositiveAlpha(alpha.as_f64()));
    }
    let class_counts = check_training_set(x, y, classes)?;
    let k = classes.len();
    let v = x.n_cols();
    let mut counts = vec![vec![T::zero(); v]; k];
    for (row, &c) in x.rows().iter().zip(y) {
        for (j, w) in row.iter() {
            counts[c][j] += w;
        }
    }
    let n = T::of_count(y.len());
    let log_prior = class_counts.iter().map(|&nk| (T::of_count(nk) / n).ln()).collect();
    let alpha_v = alpha * T::of_count(v);
    let log_prob = counts
        .into_iter()
        .map(|row| {
            let total: T = row.iter().copied().sum();
            let log_denom = (total + alpha_v).ln();
            row.into_iter().map(|c| (c + alpha).ln() - log_denom).collect()
        })
        .collect();
    Ok(MnbModel {
        classes: classes.to_vec(),
        log_prior,
        log_prob,
        alpha,
    })
}

/// Highest-scoring class (lowest index on ties) and the per-class log-scores.
pub fn predict_mnb<T: Real>(model: &MnbModel<T>, x: &FeatureVector<T>) -> (usize, Vec<T>) {
    let s = model.scores(x);
    (argmax(&s), s)
}
