//! Preprocessing, vectorization, and model training composed into one fit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::LabeledDataset;
use crate::features::{
    apply_tfidf, build_vocabulary, fit_idf, vectorize_counts, vectorize_matrix, FeatureMatrix, FeatureVector, IdfModel,
    NgramRange, Vocabulary, Weighting,
};
use crate::models::{train_logreg, train_mnb, Model, TrainConfig};
use crate::textprep::{preprocess, PrepConfig, Token};
use crate::{Error, Real, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Mnb {
        alpha: f64,
    },
    #[serde(rename = "logreg")]
    LogReg(TrainConfig<f64>),
}

impl ModelSpec {
    pub fn mnb() -> Self {
        ModelSpec::Mnb { alpha: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub prep: PrepConfig,
    pub ngram_range: NgramRange,
    pub min_count: u64,
    pub weighting: Weighting,
    pub model: ModelSpec,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.prep.validate()?;
        match &self.model {
            ModelSpec::Mnb { alpha } if !(alpha.is_finite() && *alpha > 0.0) => Err(Error::NonPositiveAlpha(*alpha)),
            ModelSpec::Mnb { .. } => Ok(()),
            ModelSpec::LogReg(c) => c.validate(),
        }
    }

    /// One-line summary for logs and tables.
    pub fn summary(&self) -> String {
        let p = &self.prep;
        let model = match &self.model {
            ModelSpec::Mnb { alpha } => format!("mnb(alpha={alpha})"),
            ModelSpec::LogReg(c) => format!(
                "logreg(penalty={}, C={}, class_weights={})",
                c.penalty, c.c, c.class_weights
            ),
        };
        format!(
            "normalize={} lowercase={} stopwords_removed={} stem={} ngrams={} min_count={} weighting={} {model}",
            p.normalize, p.lowercase, p.remove_stopwords, p.stem, self.ngram_range, self.min_count, self.weighting
        )
    }
}

/// Preprocesses every text, in parallel, preserving order.
pub fn tokenize_corpus<S: AsRef<str> + Sync>(texts: &[S], prep: &PrepConfig) -> Vec<Vec<Token>> {
    texts.par_iter().map(|t| preprocess(t.as_ref(), prep)).collect()
}

pub fn tokenize_dataset(ds: &LabeledDataset, prep: &PrepConfig) -> Vec<Vec<Token>> {
    let texts: Vec<&str> = ds.documents().iter().map(|d| d.text.as_str()).collect();
    tokenize_corpus(&texts, prep)
}

/// Everything needed to predict from raw text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FittedPipeline<T> {
    pub config: PipelineConfig,
    pub vocabulary: Vocabulary,
    pub idf: Option<IdfModel<T>>,
    pub model: Model<T>,
}

impl<T: Real> FittedPipeline<T> {
    pub fn classes(&self) -> &[String] {
        self.model.classes()
    }

    pub fn vectorize(&self, tokens: &[Token]) -> FeatureVector<T> {
        let counts = vectorize_counts(tokens, &self.vocabulary);
        match &self.idf {
            Some(idf) => apply_tfidf(&counts, idf),
            None => counts,
        }
    }

    /// Class index and per-class scores for preprocessed tokens.
    pub fn predict_tokens(&self, tokens: &[Token]) -> (usize, Vec<T>) {
        self.model.predict(&self.vectorize(tokens))
    }

    pub fn predict_text(&self, text: &str) -> (usize, Vec<T>) {
        self.predict_tokens(&preprocess(text, &self.config.prep))
    }

    pub fn predict_many(&self, tokens: &[Vec<Token>]) -> Vec<(usize, Vec<T>)> {
        tokens.par_iter().map(|t| self.predict_tokens(t)).collect()
    }

    /// Checks that vocabulary, idf, and model agree on the feature count.
    pub fn check_consistent(&self) -> Result<()> {
        let v = self.vocabulary.len();
        if self.model.n_features() != v {
            return Err(Error::Shape(format!(
                "vocabulary has {v} terms but the model expects {}",
                self.model.n_features()
            )));
        }
        if let Some(idf) = &self.idf {
            if idf.len() != v {
                return Err(Error::Shape(format!("idf has {} columns, vocabulary {v}", idf.len())));
            }
        }
        if (self.config.weighting == Weighting::Tfidf) != self.idf.is_some() {
            return Err(Error::Shape("idf presence disagrees with the weighting".into()));
        }
        Ok(())
    }
}

/// Fits vocabulary, optional idf, and model on already preprocessed documents.
pub fn fit_tokens<T: Real>(
    tokens: &[Vec<Token>],
    y: &[usize],
    classes: &[String],
    config: &PipelineConfig,
) -> Result<FittedPipeline<T>> {
    config.validate()?;
    if tokens.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let vocabulary = build_vocabulary(tokens, config.ngram_range, config.min_count)?;
    let counts: FeatureMatrix<T> = vectorize_matrix(tokens, &vocabulary);
    let (x, idf) = match config.weighting {
        Weighting::Counts => (counts, None),
        Weighting::Tfidf => {
            let idf = fit_idf(&counts);
            let rows = counts.rows().par_iter().map(|r| apply_tfidf(r, &idf)).collect();
            (FeatureMatrix::new(rows, vocabulary.len())?, Some(idf))
        }
    };
    let model = match &config.model {
        ModelSpec::Mnb { alpha } => Model::Mnb(train_mnb(&x, y, classes, T::of(*alpha))?),
        ModelSpec::LogReg(c) => Model::LogReg(train_logreg(&x, y, classes, &c.cast())?),
    };
    Ok(FittedPipeline {
        config: config.clone(),
        vocabulary,
        idf,
        model,
    })
}

/// Preprocesses and fits on a labeled dataset, classes in schema order.
pub fn fit<T: Real>(train: &LabeledDataset, config: &PipelineConfig) -> Result<FittedPipeline<T>> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let tokens = tokenize_dataset(train, &config.prep);
    fit_tokens(&tokens, &train.label_indices(), train.schema().labels(), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Penalty;

    fn config(model: ModelSpec, weighting: Weighting) -> PipelineConfig {
        PipelineConfig {
            prep: PrepConfig::full().with_stopword_removal(false),
            ngram_range: NgramRange::UNI_BI,
            min_count: 1,
            weighting,
            model,
        }
    }

    fn corpus() -> (Vec<Vec<Token>>, Vec<usize>, Vec<String>) {
        let texts = [
            "floods hit the town",
            "fire spreads fast",
            "lovely sunny day",
            "great day at the beach",
            "earthquake damage reported",
            "happy birthday friend",
        ];
        let prep = PrepConfig::full().with_stopword_removal(false);
        (
            tokenize_corpus(&texts, &prep),
            vec![0, 0, 1, 1, 0, 1],
            vec!["disaster".into(), "calm".into()],
        )
    }

    #[test]
    fn mnb_and_logreg_fit_training_data() {
        let (t, y, c) = corpus();
        for spec in [ModelSpec::mnb(), ModelSpec::LogReg(TrainConfig::new(Penalty::L2, 10.0))] {
            for w in [Weighting::Counts, Weighting::Tfidf] {
                let fitted: FittedPipeline<f64> = fit_tokens(&t, &y, &c, &config(spec.clone(), w)).unwrap();
                fitted.check_consistent().unwrap();
                let pred: Vec<usize> = fitted.predict_many(&t).into_iter().map(|p| p.0).collect();
                assert_eq!(pred, y, "{spec:?} {w:?}");
            }
        }
    }

    #[test]
    fn predict_text_applies_prep() {
        let (t, y, c) = corpus();
        let fitted: FittedPipeline<f64> = fit_tokens(&t, &y, &c, &config(ModelSpec::mnb(), Weighting::Counts)).unwrap();
        assert_eq!(fitted.predict_text("FLOODING and fires").0, 0);
    }

    #[test]
    fn rejects_bad_config() {
        let (t, y, c) = corpus();
        let bad = config(ModelSpec::Mnb { alpha: 0.0 }, Weighting::Counts);
        assert!(fit_tokens::<f64>(&t, &y, &c, &bad).is_err());
        assert!(fit_tokens::<f64>(&[], &[], &c, &config(ModelSpec::mnb(), Weighting::Counts)).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = config(ModelSpec::LogReg(TrainConfig::new(Penalty::L1, 0.5)), Weighting::Tfidf);
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<PipelineConfig>(&json).unwrap(), cfg);
    }
}
