//! N-gram vocabularies and sparse count / TF-IDF vectors.

mod tfidf;
mod vocab;

use serde::{Deserialize, Serialize};

use crate::textprep::Token;
use crate::{Error, Real, Result};

pub use tfidf::{apply_tfidf, fit_idf, IdfModel};
pub use vocab::{build_vocabulary, vectorize_counts, vectorize_matrix, Vocabulary};

/// Inclusive n-gram length range, `1 <= lo <= hi <= 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(usize, usize)", into = "(usize, usize)")]
pub struct NgramRange {
    lo: usize,
    hi: usize,
}

impl NgramRange {
    pub const MAX: usize = 3;
    pub const UNIGRAMS: NgramRange = NgramRange { lo: 1, hi: 1 };
    pub const UNI_BI: NgramRange = NgramRange { lo: 1, hi: 2 };

    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo >= 1 && lo <= hi && hi <= Self::MAX {
            Ok(NgramRange { lo, hi })
        } else {
            Err(Error::InvalidNgramRange { lo, hi })
        }
    }

    pub fn lo(self) -> usize {
        self.lo
    }

    pub fn hi(self) -> usize {
        self.hi
    }
}

impl Default for NgramRange {
    fn default() -> Self {
        NgramRange::UNIGRAMS
    }
}

impl TryFrom<(usize, usize)> for NgramRange {
    type Error = Error;

    fn try_from((lo, hi): (usize, usize)) -> Result<Self> {
        NgramRange::new(lo, hi)
    }
}

impl From<NgramRange> for (usize, usize) {
    fn from(r: NgramRange) -> Self {
        (r.lo, r.hi)
    }
}

impl std::fmt::Display for NgramRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.lo, self.hi)
    }
}

/// Calls `visit` on every n-gram, all unigrams first, then bigrams, and so on.
/// The buffer passed to `visit` is reused between calls.
pub(crate) fn for_each_ngram(tokens: &[Token], range: NgramRange, mut visit: impl FnMut(&str)) {
    let mut buf = String::new();
    for n in range.lo..=range.hi {
        for window in tokens.windows(n) {
            buf.clear();
            for (i, t) in window.iter().enumerate() {
                if i > 0 {
                    buf.push(' ');
                }
                buf.push_str(t.as_str());
            }
            visit(&buf);
        }
    }
}

/// Every contiguous window of each length in `range`, shorter lengths first,
/// tokens joined by a single space.
pub fn extract_ngrams(tokens: &[Token], range: NgramRange) -> Vec<String> {
    let mut out = Vec::new();
    for_each_ngram(tokens, range, |g| out.push(g.to_owned()));
    out
}

/// How count vectors are weighted before training.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Counts,
    Tfidf,
}

impl std::fmt::Display for Weighting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Weighting::Counts => "counts",
            Weighting::Tfidf => "tfidf",
        })
    }
}

/// Sparse row: strictly increasing column indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FeatureVector<T> {
    entries: Vec<(usize, T)>,
}

impl<T: Real> FeatureVector<T> {
    pub fn empty() -> Self {
        FeatureVector { entries: Vec::new() }
    }

    /// Sorts by index, sums duplicates, and drops zeros.
    pub fn from_pairs(mut pairs: Vec<(usize, T)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(usize, T)> = Vec::with_capacity(pairs.len());
        for (j, w) in pairs {
            match entries.last_mut() {
                Some(last) if last.0 == j => last.1 += w,
                _ => entries.push((j, w)),
            }
        }
        entries.retain(|e| e.1 != T::zero());
        FeatureVector { entries }
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.entries.iter().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, j: usize) -> T {
        self.entries
            .binary_search_by_key(&j, |e| e.0)
            .map_or(T::zero(), |i| self.entries[i].1)
    }

    /// One past the largest stored index, 0 when empty.
    pub fn min_width(&self) -> usize {
        self.entries.last().map_or(0, |e| e.0 + 1)
    }

    pub fn sum(&self) -> T {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn l2_norm(&self) -> T {
        self.entries.iter().map(|e| e.1 * e.1).sum::<T>().sqrt()
    }

    pub fn dot(&self, dense: &[T]) -> T {
        self.entries.iter().map(|&(j, w)| w * dense[j]).sum()
    }

    pub fn map_weights(&self, mut f: impl FnMut(usize, T) -> T) -> Self {
        let mut entries: Vec<(usize, T)> = self.entries.iter().map(|&(j, w)| (j, f(j, w))).collect();
        entries.retain(|e| e.1 != T::zero());
        FeatureVector { entries }
    }

    pub fn cast<U: Real>(&self) -> FeatureVector<U> {
        FeatureVector {
            entries: self.entries.iter().map(|&(j, w)| (j, U::of(w.as_f64()))).collect(),
        }
    }
}

/// Rows sharing one column count.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FeatureMatrix<T> {
    rows: Vec<FeatureVector<T>>,
    n_cols: usize,
}

impl<T: Real> FeatureMatrix<T> {
    pub fn new(rows: Vec<FeatureVector<T>>, n_cols: usize) -> Result<Self> {
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.min_width() > n_cols) {
            return Err(Error::Shape(format!(
                "row {i} has column {} but the matrix has {n_cols} columns",
                r.min_width() - 1
            )));
        }
        Ok(FeatureMatrix { rows, n_cols })
    }

    pub fn rows(&self) -> &[FeatureVector<T>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &FeatureVector<T> {
        &self.rows[i]
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        FeatureMatrix {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            n_cols: self.n_cols,
        }
    }

    pub fn into_rows(self) -> Vec<FeatureVector<T>> {
        self.rows
    }
}
