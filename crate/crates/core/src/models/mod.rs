//! Multinomial naive Bayes and softmax logistic regression on sparse features.

mod logreg;
mod mnb;
pub mod optim;

use serde::{Deserialize, Serialize};

use crate::features::{FeatureMatrix, FeatureVector};
use crate::{Error, Real, Result};

pub use logreg::{
    loss_and_gradient, predict_logreg, train_logreg, ClassWeights, Init, LogRegModel, Objective, Penalty, TrainConfig,
    TrainDiagnostics,
};
pub use mnb::{predict_mnb, train_mnb, MnbModel};

/// Validates shapes and labels; returns per-class row counts.
pub(crate) fn check_training_set<T: Real>(x: &FeatureMatrix<T>, y: &[usize], classes: &[String]) -> Result<Vec<usize>> {
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch {
            truth: y.len(),
            predicted: x.n_rows(),
        });
    }
    if y.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut counts = vec![0usize; classes.len()];
    for &c in y {
        if c >= classes.len() {
            return Err(Error::UnknownLabel(c.to_string()));
        }
        counts[c] += 1;
    }
    if classes.len() < 2 || counts.iter().filter(|&&n| n > 0).count() < 2 {
        let only = counts.iter().position(|&n| n > 0).unwrap_or(0);
        return Err(Error::SingleClass(classes.get(only).cloned().unwrap_or_default()));
    }
    if let Some(k) = counts.iter().position(|&n| n == 0) {
        return Err(Error::ClassTooSmall {
            label: classes[k].clone(),
            count: 0,
            required: 1,
        });
    }
    Ok(counts)
}

/// Either trained classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Real")]
pub enum Model<T> {
    Mnb(MnbModel<T>),
    #[serde(rename = "logreg")]
    LogReg(LogRegModel<T>),
}

impl<T: Real> Model<T> {
    pub fn classes(&self) -> &[String] {
        match self {
            Model::Mnb(m) => m.classes(),
            Model::LogReg(m) => m.classes(),
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Model::Mnb(m) => m.n_features(),
            Model::LogReg(m) => m.n_features(),
        }
    }

    /// Class index and per-class scores: log-scores for naive Bayes,
    /// probabilities for logistic regression.
    pub fn predict(&self, x: &FeatureVector<T>) -> (usize, Vec<T>) {
        match self {
            Model::Mnb(m) => predict_mnb(m, x),
            Model::LogReg(m) => predict_logreg(m, x),
        }
    }

    pub fn predict_label(&self, x: &FeatureVector<T>) -> usize {
        self.predict(x).0
    }

    pub fn diagnostics(&self) -> Option<&TrainDiagnostics<T>> {
        match self {
            Model::Mnb(_) => None,
            Model::LogReg(m) => Some(m.diagnostics()),
        }
    }
}
