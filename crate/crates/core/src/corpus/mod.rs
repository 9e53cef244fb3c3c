//! Labeled tweet collections: schemas, CSV loading, relabeling, and splitting.

mod csv;

use std::collections::{BTreeMap, HashSet};

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use self::csv::quote_field as quote_csv_field;
pub use self::csv::{
    decode_bytes, load_csv, load_csv_bytes, load_csv_str, load_unlabeled_csv, to_csv_string, write_csv, LoadOutcome,
    LoadReport, RejectReason, RejectedRow, TextEncoding, UnlabeledRow,
};

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 42;

/// One tweet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keyword: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            label: label.into(),
            location: None,
            keyword: None,
            date: None,
        }
    }
}

/// CSV column names feeding each [`Document`] field.
///
/// When `id` is `None` the 1-based data row ordinal becomes the id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub id: Option<String>,
    pub text: String,
    pub label: String,
    #[serde(default)]
    pub location: Option<String>,
    #[serde(default)]
    pub keyword: Option<String>,
    #[serde(default)]
    pub date: Option<String>,
}

impl ColumnMap {
    pub fn new(id: Option<&str>, text: &str, label: &str) -> Self {
        ColumnMap {
            id: id.map(str::to_owned),
            text: text.to_owned(),
            label: label.to_owned(),
            location: None,
            keyword: None,
            date: None,
        }
    }
}

/// Names a dataset's classes and how raw CSV values decode into them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemaRepr", into = "SchemaRepr")]
pub struct LabelSchema {
    name: String,
    labels: Vec<String>,
    columns: ColumnMap,
    decoder: IndexMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct SchemaRepr {
    name: String,
    labels: Vec<String>,
    columns: ColumnMap,
    decoder: IndexMap<String, String>,
}

impl TryFrom<SchemaRepr> for LabelSchema {
    type Error = Error;

    fn try_from(r: SchemaRepr) -> Result<Self> {
        LabelSchema::new(r.name, r.labels, r.columns, r.decoder)
    }
}

impl From<LabelSchema> for SchemaRepr {
    fn from(s: LabelSchema) -> Self {
        SchemaRepr {
            name: s.name,
            labels: s.labels,
            columns: s.columns,
            decoder: s.decoder,
        }
    }
}

impl LabelSchema {
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        columns: ColumnMap,
        decoder: IndexMap<String, String>,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidSchema {
            schema: name.clone(),
            reason,
        };
        if labels.is_empty() {
            return Err(invalid("no labels".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(invalid(format!("duplicate label `{l}`")));
            }
        }
        for (raw, label) in &decoder {
            if !seen.contains(label.as_str()) {
                return Err(invalid(format!("decoder maps `{raw}` to unknown label `{label}`")));
            }
        }
        Ok(LabelSchema {
            name,
            labels,
            columns,
            decoder,
        })
    }

    /// Decoder that accepts each label string verbatim.
    pub fn identity_decoder(labels: &[String]) -> IndexMap<String, String> {
        labels.iter().map(|l| (l.clone(), l.clone())).collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn columns(&self) -> &ColumnMap {
        &self.columns
    }

    pub fn decoder(&self) -> &IndexMap<String, String> {
        &self.decoder
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Maps a raw CSV value to its label; surrounding whitespace is ignored.
    pub fn decode(&self, raw: &str) -> Option<&str> {
        self.decoder.get(raw.trim()).map(String::as_str)
    }

    /// First raw value that decodes to `label`.
    pub fn encode(&self, label: &str) -> Option<&str> {
        self.decoder
            .iter()
            .find_map(|(raw, l)| (l == label).then_some(raw.as_str()))
    }
}

/// A validated collection of documents under one schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDataset {
    schema: LabelSchema,
    documents: Vec<Document>,
}

impl LabeledDataset {
    pub fn new(schema: LabelSchema, documents: Vec<Document>) -> Result<Self> {
        let mut ids = HashSet::with_capacity(documents.len());
        for d in &documents {
            if schema.label_index(&d.label).is_none() {
                return Err(Error::InvalidDataset(format!(
                    "document `{}` has label `{}` outside schema `{}`",
                    d.id,
                    d.label,
                    schema.name()
                )));
            }
            if d.text.trim().is_empty() {
                return Err(Error::InvalidDataset(format!("document `{}` has empty text", d.id)));
            }
            if !ids.insert(d.id.as_str()) {
                return Err(Error::InvalidDataset(format!("duplicate document id `{}`", d.id)));
            }
        }
        Ok(LabeledDataset { schema, documents })
    }

    pub fn schema(&self) -> &LabelSchema {
        &self.schema
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Class index of every document, in document order.
    pub fn label_indices(&self) -> Vec<usize> {
        self.documents
            .iter()
            .map(|d| self.schema.label_index(&d.label).expect("validated label"))
            .collect()
    }

    /// Document count per schema label.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.schema.labels().len()];
        for k in self.label_indices() {
            counts[k] += 1;
        }
        counts
    }

    /// Documents at `indices`, in the given order, under the same schema.
    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            schema: self.schema.clone(),
            documents: indices.iter().map(|&i| self.documents[i].clone()).collect(),
        }
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }
}

/// Relabels every document through `mapping`.
///
/// The new label list is the image of the old one in schema order, with
/// duplicates collapsed onto their first appearance.
pub fn map_labels(dataset: &LabeledDataset, mapping: &IndexMap<String, String>) -> Result<LabeledDataset> {
    let present: HashSet<&str> = dataset.documents.iter().map(|d| d.label.as_str()).collect();
    let mut labels: Vec<String> = Vec::new();
    for old in dataset.schema.labels() {
        match mapping.get(old) {
            Some(new) => {
                if !labels.contains(new) {
                    labels.push(new.clone());
                }
            }
            None if present.contains(old.as_str()) => return Err(Error::UnmappedLabel(old.clone())),
            None => {}
        }
    }
    let decoder = dataset
        .schema
        .decoder()
        .iter()
        .filter_map(|(raw, old)| mapping.get(old).map(|new| (raw.clone(), new.clone())))
        .collect();
    let schema = LabelSchema::new(dataset.schema.name(), labels, dataset.schema.columns().clone(), decoder)?;
    let documents = dataset
        .documents
        .iter()
        .map(|d| {
            let mut d = d.clone();
            d.label = mapping[&d.label].clone();
            d
        })
        .collect();
    Ok(LabeledDataset { schema, documents })
}

/// Hold-out split parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub holdout_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(holdout_fraction: f64, seed: u64) -> Result<Self> {
        let spec = SplitSpec {
            holdout_fraction,
            seed,
            stratified: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0 {
            Ok(())
        } else {
            Err(Error::FractionOutOfRange(self.holdout_fraction))
        }
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            holdout_fraction: 0.2,
            seed: DEFAULT_SEED,
            stratified: true,
        }
    }
}

/// Splits into `(train, holdout)`, both in original document order.
///
/// The holdout receives `round(fraction * N)` documents. Each class
/// contributes `floor(fraction * n_k)` or one more; the extra slots go to
/// the classes with the largest fractional remainders.
pub fn stratified_split(dataset: &LabeledDataset, spec: &SplitSpec) -> Result<(LabeledDataset, LabeledDataset)> {
    spec.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = dataset.len();
    let target = (spec.holdout_fraction * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut held = vec![false; n];

    if spec.stratified {
        let labels = dataset.label_indices();
        let k = dataset.schema.labels().len();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &c) in labels.iter().enumerate() {
            members[c].push(i);
        }
        for (c, m) in members.iter().enumerate() {
            if m.len() == 1 {
                return Err(Error::ClassTooSmall {
                    label: dataset.schema.labels()[c].clone(),
                    count: 1,
                    required: 2,
                });
            }
        }
        let exact: Vec<f64> = members.iter().map(|m| spec.holdout_fraction * m.len() as f64).collect();
        let mut quota: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
        let assigned: usize = quota.iter().sum();
        let mut order: Vec<usize> = (0..k).filter(|&c| !members[c].is_empty()).collect();
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &c in order.iter().take(target.saturating_sub(assigned)) {
            quota[c] += 1;
        }
        for (c, m) in members.iter_mut().enumerate() {
            m.shuffle(&mut rng);
            for &i in m.iter().take(quota[c]) {
                held[i] = true;
            }
        }
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        for &i in all.iter().take(target) {
            held[i] = true;
        }
    }

    let (hold, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| held[i]);
    Ok((dataset.subset(&train), dataset.subset(&hold)))
}

/// Fraction of documents per schema label, in schema order.
pub fn class_distribution(dataset: &LabeledDataset) -> Result<IndexMap<String, f64>> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = dataset.len() as f64;
    Ok(dataset
        .schema
        .labels()
        .iter()
        .cloned()
        .zip(dataset.class_counts())
        .map(|(l, c)| (l, c as f64 / n))
        .collect())
}

/// Label-to-label mapping helper for literal tables.
pub fn label_mapping<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> IndexMap<String, String> {
    pairs.into_iter().map(|(a, b)| (a.to_owned(), b.to_owned())).collect()
}

/// Per-label document counts, keyed by label.
pub fn class_counts_by_label(dataset: &LabeledDataset) -> BTreeMap<String, usize> {
    dataset
        .schema
        .labels()
        .iter()
        .cloned()
        .zip(dataset.class_counts())
        .collect()
}
