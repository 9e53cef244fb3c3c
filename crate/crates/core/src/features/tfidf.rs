use serde::{Deserialize, Serialize};

use super::{FeatureMatrix, FeatureVector};
use crate::{Error, Real, Result};

/// Smoothed inverse document frequencies, `ln((1 + n) / (1 + df)) + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct IdfModel<T> {
    idf: Vec<T>,
    n_docs: usize,
}

impl<T: Real> IdfModel<T> {
    /// From per-column document frequencies over `n_docs` documents.
    pub fn from_doc_counts(doc_count: &[u64], n_docs: usize) -> Result<Self> {
        if let Some(j) = doc_count.iter().position(|&d| d as usize > n_docs) {
            return Err(Error::Shape(format!(
                "column {j} appears in {} documents but only {n_docs} were counted",
                doc_count[j]
            )));
        }
        let n = T::of_count(n_docs);
        let idf = doc_count
            .iter()
            .map(|&d| ((T::one() + n) / (T::one() + T::of(d as f64))).ln() + T::one())
            .collect();
        Ok(IdfModel { idf, n_docs })
    }

    pub fn idf(&self) -> &[T] {
        &self.idf
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn len(&self) -> usize {
        self.idf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idf.is_empty()
    }
}

/// Fits document frequencies on the training matrix.
pub fn fit_idf<T: Real>(matrix: &FeatureMatrix<T>) -> IdfModel<T> {
    let mut df = vec![0u64; matrix.n_cols()];
    for row in matrix.rows() {
        for (j, _) in row.iter() {
            df[j] += 1;
        }
    }
    IdfModel::from_doc_counts(&df, matrix.n_rows()).expect("each row counts a column at most once")
}

/// Multiplies by idf, then scales to unit Euclidean norm. Zero vectors pass through.
pub fn apply_tfidf<T: Real>(vector: &FeatureVector<T>, idf: &IdfModel<T>) -> FeatureVector<T> {
    let weighted = vector.map_weights(|j, w| w * idf.idf[j]);
    let norm = weighted.l2_norm();
    if norm == T::zero() {
        return weighted;
    }
    weighted.map_weights(|_, w| w / norm)
}
