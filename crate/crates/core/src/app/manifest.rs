//! Static description of the three supported tweet datasets.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::corpus::{label_mapping, ColumnMap, LabelSchema};
use crate::features::{NgramRange, Weighting};
use crate::models::{ClassWeights, Penalty, TrainConfig};
use crate::pipeline::{ModelSpec, PipelineConfig};
use crate::textprep::PrepConfig;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetId {
    Climate,
    Coronavirus,
    Disaster,
}

impl DatasetId {
    pub const ALL: [DatasetId; 3] = [DatasetId::Climate, DatasetId::Coronavirus, DatasetId::Disaster];

    pub fn name(self) -> &'static str {
        match self {
            DatasetId::Climate => "climate",
            DatasetId::Coronavirus => "coronavirus",
            DatasetId::Disaster => "disaster",
        }
    }

    pub fn valid_names() -> String {
        DatasetId::ALL.map(DatasetId::name).join(", ")
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DatasetId::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownDataset {
                name: s.to_owned(),
                valid: DatasetId::valid_names(),
            })
    }
}

/// Inclusive acceptance interval for an observed score; a missing bound is open.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Band {
    pub fn around(center: f64, tolerance: f64) -> Self {
        Band {
            lo: Some(center - tolerance),
            hi: Some(center + tolerance),
        }
    }

    pub fn at_least(lo: f64) -> Self {
        Band { lo: Some(lo), hi: None }
    }

    pub fn at_most(hi: f64) -> Self {
        Band { lo: None, hi: Some(hi) }
    }

    /// Rounding slack keeps printed-boundary values inside.
    pub fn contains(&self, x: f64) -> bool {
        const SLACK: f64 = 1e-9;
        x.is_finite() && self.lo.is_none_or(|lo| x >= lo - SLACK) && self.hi.is_none_or(|hi| x <= hi + SLACK)
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.lo, self.hi) {
            (Some(lo), Some(hi)) => write!(f, "[{lo:.3}, {hi:.3}]"),
            (Some(lo), None) => write!(f, ">= {lo:.3}"),
            (None, Some(hi)) => write!(f, "<= {hi:.3}"),
            (None, None) => f.write_str("any"),
        }
    }
}

/// A published score that a local run is compared against.
///
/// `key` names the observation produced by `reproduce`; rows without a band
/// are printed for context only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceScore {
    pub key: String,
    pub reference: f64,
    pub band: Option<Band>,
    pub citation: String,
}

/// A published transformer score shown beside local results but never computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublishedConstant {
    pub model: String,
    pub metric: String,
    pub value: f64,
    pub citation: String,
}

/// Label list, decoder, and columns plus the canned configurations for one dataset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DatasetManifest {
    pub id: DatasetId,
    /// Labeled file, then accepted alternatives.
    pub train_files: Vec<String>,
    /// Unlabeled competition file, if the dataset ships one.
    pub test_file: Option<String>,
    pub source_url: String,
    pub schema: LabelSchema,
    /// Applied after loading; maps raw classes onto the evaluated ones.
    pub label_merge: Option<IndexMap<String, String>>,
    pub holdout_fraction: f64,
    pub baseline: PipelineConfig,
    pub tuned: PipelineConfig,
    /// Class shares reported for the full published dataset.
    pub published_distribution: IndexMap<String, f64>,
    pub references: Vec<ReferenceScore>,
    pub published_constants: Vec<PublishedConstant>,
    /// Assumptions the canned configurations rest on.
    pub notes: Vec<String>,
}

impl DatasetManifest {
    /// First train file found under `dir`.
    pub fn locate_train(&self, dir: &Path) -> Result<PathBuf> {
        self.train_files
            .iter()
            .map(|f| dir.join(f))
            .find(|p| p.is_file())
            .ok_or_else(|| self.missing(dir, &self.train_files.join(", ")))
    }

    pub fn locate_test(&self, dir: &Path) -> Result<Option<PathBuf>> {
        match &self.test_file {
            None => Ok(None),
            Some(f) => {
                let p = dir.join(f);
                if p.is_file() {
                    Ok(Some(p))
                } else {
                    Err(self.missing(dir, f))
                }
            }
        }
    }

    fn missing(&self, dir: &Path, expected: &str) -> Error {
        Error::MissingDataFile {
            dataset: self.id.name().to_owned(),
            expected: expected.to_owned(),
            dir: dir.to_owned(),
            source_url: self.source_url.clone(),
        }
    }

    /// Schema after the label merge, if any.
    pub fn evaluated_labels(&self) -> Vec<String> {
        match &self.label_merge {
            None => self.schema.labels().to_vec(),
            Some(m) => {
                let mut out: Vec<String> = Vec::new();
                for l in self.schema.labels() {
                    if !out.contains(&m[l]) {
                        out.push(m[l].clone());
                    }
                }
                out
            }
        }
    }

    pub fn reference(&self, key: &str) -> Option<&ReferenceScore> {
        self.references.iter().find(|r| r.key == key)
    }
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| (*s).to_owned()).collect()
}

fn logreg(c: f64) -> ModelSpec {
    ModelSpec::LogReg(TrainConfig::new(Penalty::L2, c).with_class_weights(ClassWeights::None))
}

/// Raw text, every token kept, unigram counts, naive Bayes with alpha 1.
pub fn baseline_config() -> PipelineConfig {
    PipelineConfig {
        prep: PrepConfig::raw(),
        ngram_range: NgramRange::UNIGRAMS,
        min_count: 1,
        weighting: Weighting::Counts,
        model: ModelSpec::mnb(),
    }
}

fn reference(key: &str, value: f64, band: Option<Band>, citation: &str) -> ReferenceScore {
    ReferenceScore {
        key: key.to_owned(),
        reference: value,
        band,
        citation: citation.to_owned(),
    }
}

fn constant(metric: &str, value: f64, citation: &str) -> PublishedConstant {
    PublishedConstant {
        model: "BERT base (uncased), fine-tuned".to_owned(),
        metric: metric.to_owned(),
        value,
        citation: citation.to_owned(),
    }
}

fn shares(v: &[(&str, f64)]) -> IndexMap<String, f64> {
    v.iter().map(|(k, x)| ((*k).to_owned(), *x)).collect()
}

pub fn manifest(id: DatasetId) -> DatasetManifest {
    match id {
        DatasetId::Climate => climate(),
        DatasetId::Coronavirus => coronavirus(),
        DatasetId::Disaster => disaster(),
    }
}

pub fn manifest_by_name(name: &str) -> Result<DatasetManifest> {
    Ok(manifest(name.parse()?))
}

fn climate() -> DatasetManifest {
    let labels = strings(&["Anti", "Neutral", "Pro", "News"]);
    let decoder = label_mapping([("-1", "Anti"), ("0", "Neutral"), ("1", "Pro"), ("2", "News")]);
    let schema = LabelSchema::new(
        "climate",
        labels,
        ColumnMap::new(Some("tweetid"), "message", "sentiment"),
        decoder,
    )
    .expect("static schema");
    let tuned = PipelineConfig {
        prep: PrepConfig::full().with_stopword_removal(false),
        ngram_range: NgramRange::UNI_BI,
        min_count: 3,
        weighting: Weighting::Counts,
        model: logreg(0.31),
    };
    DatasetManifest {
        id: DatasetId::Climate,
        train_files: strings(&["twitter_sentiment_data.csv"]),
        test_file: None,
        source_url: "https://www.kaggle.com/datasets/edqian/twitter-climate-change-sentiment-dataset".into(),
        schema,
        label_merge: None,
        holdout_fraction: 0.2,
        baseline: baseline_config(),
        tuned,
        published_distribution: shares(&[("Anti", 0.09), ("Neutral", 0.18), ("Pro", 0.52), ("News", 0.21)]),
        references: vec![
            reference(
                "baseline.holdout.weighted_f1",
                0.64,
                Some(Band::around(0.64, 0.05)),
                "raw-text naive Bayes baseline, bag of words, 20% holdout, weighted average F1",
            ),
            reference(
                "baseline.holdout.macro_f1",
                0.50,
                None,
                "raw-text naive Bayes baseline, 20% holdout, macro average F1",
            ),
            reference(
                "baseline_tfidf.holdout.weighted_f1",
                0.51,
                None,
                "raw-text naive Bayes baseline with TF-IDF weighting, weighted average F1",
            ),
            reference(
                "tfidf_gap.holdout.weighted_f1",
                0.13,
                Some(Band::at_least(0.05)),
                "bag-of-words baseline minus TF-IDF baseline, weighted average F1",
            ),
            reference(
                "tuned.cv.weighted_f1",
                0.71,
                Some(Band::around(0.71, 0.04)),
                "10-fold cross-validation average F1 after tuning threshold, stopwords and bigrams",
            ),
            reference(
                "tuned.cv.macro_f1",
                0.71,
                None,
                "same average under the macro reading of F1",
            ),
            reference(
                "tuned.holdout.weighted_f1",
                0.78,
                Some(Band::around(0.78, 0.04)),
                "tuned logistic regression on the holdout, weighted average F1",
            ),
            reference(
                "tuned.holdout.macro_f1",
                0.69,
                None,
                "tuned logistic regression on the holdout, macro average F1",
            ),
            reference(
                "two_stage_gap.holdout.weighted_f1",
                0.0,
                Some(Band::at_most(0.02)),
                "news/non-news cascade minus single classifier, weighted average F1; the cascade did not win",
            ),
        ],
        published_constants: vec![
            constant(
                "holdout weighted F1",
                0.80,
                "climate holdout, BERT results and final comparison",
            ),
            constant("holdout macro F1", 0.74, "climate holdout, BERT results"),
        ],
        notes: vec![],
    }
}

fn coronavirus() -> DatasetManifest {
    let labels = strings(&[
        "Extremely Negative",
        "Negative",
        "Neutral",
        "Positive",
        "Extremely Positive",
    ]);
    let decoder = LabelSchema::identity_decoder(&labels);
    let mut columns = ColumnMap::new(Some("UserName"), "OriginalTweet", "Sentiment");
    columns.location = Some("Location".into());
    columns.date = Some("TweetAt".into());
    let schema = LabelSchema::new("coronavirus", labels, columns, decoder).expect("static schema");
    let merge = label_mapping([
        ("Extremely Negative", "Negative"),
        ("Negative", "Negative"),
        ("Neutral", "Neutral"),
        ("Positive", "Positive"),
        ("Extremely Positive", "Positive"),
    ]);
    let tuned = PipelineConfig {
        prep: PrepConfig::full().with_stopword_removal(false),
        ngram_range: NgramRange::UNI_BI,
        min_count: 20,
        weighting: Weighting::Counts,
        model: logreg(0.5),
    };
    DatasetManifest {
        id: DatasetId::Coronavirus,
        train_files: strings(&["Corona_NLP_train.csv"]),
        test_file: None,
        source_url: "https://www.kaggle.com/datasets/datatattle/covid-19-nlp-text-classification".into(),
        schema,
        label_merge: Some(merge),
        holdout_fraction: 0.2,
        baseline: baseline_config(),
        tuned,
        published_distribution: shares(&[
            ("Extremely Negative", 0.13),
            ("Negative", 0.24),
            ("Neutral", 0.19),
            ("Positive", 0.28),
            ("Extremely Positive", 0.16),
        ]),
        references: vec![
            reference(
                "baseline.holdout.weighted_f1",
                0.66,
                Some(Band::around(0.66, 0.05)),
                "raw-text naive Bayes baseline on three merged classes, weighted average F1",
            ),
            reference(
                "baseline.holdout.accuracy",
                0.67,
                Some(Band::around(0.67, 0.05)),
                "raw-text naive Bayes baseline on three merged classes, accuracy",
            ),
            reference(
                "tuned.cv.weighted_f1",
                0.80,
                None,
                "logistic regression under cross-validation during classifier selection, F1",
            ),
            reference(
                "tuned.holdout.weighted_f1",
                0.81,
                Some(Band::around(0.81, 0.04)),
                "tuned logistic regression on three classes, holdout weighted F1",
            ),
            reference(
                "tuned.holdout.accuracy",
                0.81,
                Some(Band::around(0.81, 0.04)),
                "tuned logistic regression on three classes, holdout accuracy",
            ),
            reference(
                "tuned_5class.holdout.weighted_f1",
                0.62,
                Some(Band::around(0.62, 0.04)),
                "tuned logistic regression on all five classes, holdout weighted F1",
            ),
            reference(
                "tuned_5class.holdout.accuracy",
                0.62,
                None,
                "tuned logistic regression on all five classes, holdout accuracy",
            ),
        ],
        published_constants: vec![
            constant("3-class holdout weighted F1", 0.91, "coronavirus, three classes"),
            constant("3-class holdout accuracy", 0.91, "coronavirus, three classes"),
            constant("5-class holdout weighted F1", 0.79, "coronavirus, five classes"),
            constant("5-class holdout accuracy", 0.79, "coronavirus, five classes"),
        ],
        notes: vec![
            "preprocessing toggles for the tuned run are not enumerated in the source; the full pipeline with stopwords kept and (1,2)-grams is assumed".into(),
        ],
    }
}

fn disaster() -> DatasetManifest {
    let labels = strings(&["not_disaster", "disaster"]);
    let decoder = label_mapping([("0", "not_disaster"), ("1", "disaster")]);
    let mut columns = ColumnMap::new(Some("id"), "text", "target");
    columns.keyword = Some("keyword".into());
    columns.location = Some("location".into());
    let schema = LabelSchema::new("disaster", labels, columns, decoder).expect("static schema");
    let tuned = PipelineConfig {
        prep: PrepConfig::raw().with_stopword_removal(true),
        ngram_range: NgramRange::UNIGRAMS,
        min_count: 3,
        weighting: Weighting::Counts,
        model: logreg(0.31),
    };
    DatasetManifest {
        id: DatasetId::Disaster,
        train_files: strings(&["train.csv"]),
        test_file: Some("test.csv".into()),
        source_url: "https://www.kaggle.com/competitions/nlp-getting-started/data".into(),
        schema,
        label_merge: None,
        holdout_fraction: 0.2,
        baseline: baseline_config(),
        tuned,
        published_distribution: shares(&[("not_disaster", 0.57), ("disaster", 0.43)]),
        references: vec![
            reference(
                "baseline.cv.accuracy",
                0.795,
                Some(Band::around(0.795, 0.02)),
                "raw-text naive Bayes baseline accuracy",
            ),
            reference(
                "tuned.cv.accuracy",
                0.805,
                Some(Band::around(0.805, 0.02)),
                "logistic regression, 10-fold cross-validation accuracy on the training file",
            ),
            reference(
                "tuned_mnb.cv.accuracy",
                0.805,
                Some(Band::around(0.805, 0.02)),
                "naive Bayes with the tuned features, 10-fold cross-validation accuracy",
            ),
            reference(
                "kaggle.test.accuracy",
                0.801,
                None,
                "competition leaderboard accuracy on the unlabeled test file; not reproducible offline",
            ),
        ],
        published_constants: vec![
            constant(
                "competition test accuracy",
                0.838,
                "disaster tweets leaderboard submission",
            ),
            constant(
                "accuracy (rounded in the final comparison)",
                0.84,
                "disaster tweets, final comparison",
            ),
        ],
        notes: vec!["stopwords are removed on raw text; normalization and stemming cost accuracy and stay off".into()],
    }
}
