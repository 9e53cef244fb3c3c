use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{for_each_ngram, FeatureMatrix, FeatureVector, NgramRange};
use crate::textprep::Token;
use crate::{Error, Real, Result};

/// Term-to-column map fit on a training corpus. Columns follow first
/// appearance; every term occurs at least `min_count` times in the corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VocabRepr", into = "VocabRepr")]
pub struct Vocabulary {
    terms: IndexMap<String, usize>,
    corpus_count: Vec<u64>,
    doc_count: Vec<u64>,
    n_docs: usize,
    ngram_range: NgramRange,
    min_count: u64,
}

#[derive(Serialize, Deserialize)]
struct VocabRepr {
    ngram_range: NgramRange,
    min_count: u64,
    n_docs: usize,
    terms: Vec<String>,
    corpus_count: Vec<u64>,
    doc_count: Vec<u64>,
}

impl TryFrom<VocabRepr> for Vocabulary {
    type Error = Error;

    fn try_from(r: VocabRepr) -> Result<Self> {
        let n = r.terms.len();
        if r.corpus_count.len() != n || r.doc_count.len() != n {
            return Err(Error::Shape(format!(
                "vocabulary has {n} terms but {} corpus counts and {} document counts",
                r.corpus_count.len(),
                r.doc_count.len()
            )));
        }
        let mut terms = IndexMap::with_capacity(n);
        for (i, t) in r.terms.into_iter().enumerate() {
            if terms.insert(t.clone(), i).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate vocabulary term {t:?}")));
            }
        }
        if let Some(i) = r.corpus_count.iter().position(|&c| c < r.min_count) {
            return Err(Error::InvalidConfig(format!(
                "term {:?} occurs {} times, below min_count {}",
                terms.get_index(i).map(|e| e.0).unwrap_or(&String::new()),
                r.corpus_count[i],
                r.min_count
            )));
        }
        Ok(Vocabulary {
            terms,
            corpus_count: r.corpus_count,
            doc_count: r.doc_count,
            n_docs: r.n_docs,
            ngram_range: r.ngram_range,
            min_count: r.min_count,
        })
    }
}

impl From<Vocabulary> for VocabRepr {
    fn from(v: Vocabulary) -> Self {
        VocabRepr {
            ngram_range: v.ngram_range,
            min_count: v.min_count,
            n_docs: v.n_docs,
            terms: v.terms.into_keys().collect(),
            corpus_count: v.corpus_count,
            doc_count: v.doc_count,
        }
    }
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.get(term).copied()
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get_index(index).map(|e| e.0.as_str())
    }

    /// Terms in column order.
    pub fn terms(&self) -> impl Iterator<Item = &str> + '_ {
        self.terms.keys().map(String::as_str)
    }

    pub fn corpus_count(&self, index: usize) -> u64 {
        self.corpus_count[index]
    }

    pub fn doc_count(&self, index: usize) -> u64 {
        self.doc_count[index]
    }

    pub fn corpus_counts(&self) -> &[u64] {
        &self.corpus_count
    }

    pub fn doc_counts(&self) -> &[u64] {
        &self.doc_count
    }

    /// Number of documents the vocabulary was fit on.
    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn ngram_range(&self) -> NgramRange {
        self.ngram_range
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }
}

/// Keeps every n-gram whose total corpus occurrence count is at least
/// `min_count`, in order of first appearance.
pub fn build_vocabulary(docs: &[Vec<Token>], range: NgramRange, min_count: u64) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    // (corpus_count, doc_count, last document seen)
    let mut counts: IndexMap<String, (u64, u64, usize)> = IndexMap::new();
    for (d, doc) in docs.iter().enumerate() {
        for_each_ngram(doc, range, |g| match counts.get_mut(g) {
            Some(c) => {
                c.0 += 1;
                if c.2 != d {
                    c.1 += 1;
                    c.2 = d;
                }
            }
            None => {
                counts.insert(g.to_owned(), (1, 1, d));
            }
        });
    }
    counts.retain(|_, c| c.0 >= min_count);
    if counts.is_empty() {
        return Err(Error::EmptyVocabulary(min_count));
    }
    let mut terms = IndexMap::with_capacity(counts.len());
    let mut corpus_count = Vec::with_capacity(counts.len());
    let mut doc_count = Vec::with_capacity(counts.len());
    for (i, (t, c)) in counts.into_iter().enumerate() {
        terms.insert(t, i);
        corpus_count.push(c.0);
        doc_count.push(c.1);
    }
    Ok(Vocabulary {
        terms,
        corpus_count,
        doc_count,
        n_docs: docs.len(),
        ngram_range: range,
        min_count,
    })
}

/// Occurrence counts of in-vocabulary n-grams; others are dropped.
pub fn vectorize_counts<T: Real>(tokens: &[Token], vocab: &Vocabulary) -> FeatureVector<T> {
    let mut pairs = Vec::new();
    for_each_ngram(tokens, vocab.ngram_range, |g| {
        if let Some(j) = vocab.index_of(g) {
            pairs.push((j, T::one()));
        }
    });
    FeatureVector::from_pairs(pairs)
}

pub fn vectorize_matrix<T: Real>(docs: &[Vec<Token>], vocab: &Vocabulary) -> FeatureMatrix<T> {
    use rayon::prelude::*;
    let rows = docs.par_iter().map(|d| vectorize_counts(d, vocab)).collect();
    FeatureMatrix::new(rows, vocab.len()).expect("indices come from the vocabulary")
}
