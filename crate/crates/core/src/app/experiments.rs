//! Canned experiment runs over the manifest datasets.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::bundle::{fit_pipeline, ModelBundle, BUNDLE_FORMAT_VERSION};
use super::manifest::{manifest, Band, DatasetId, DatasetManifest, PublishedConstant};
use crate::corpus::{
    load_csv, load_unlabeled_csv, map_labels, quote_csv_field, stratified_split, LabelSchema, LabeledDataset,
    LoadReport, SplitSpec, UnlabeledRow,
};
use crate::eval::{compute_report_indices, kfold_cv, CvResult, EvalReport, FoldSpec, Scoring};
use crate::features::Weighting;
use crate::models::Model;
use crate::pipeline::{fit, tokenize_corpus, tokenize_dataset, FittedPipeline, ModelSpec, PipelineConfig};
use crate::textprep::STOPWORDS_VERSION;
use crate::{softmax, Error, Result};

/// Label printed next to transformer scores, which are never computed here.
pub const PUBLISHED_LABEL: &str = "published reference, not computed";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Versions {
    pub crate_version: String,
    pub bundle_format: u64,
    pub stopwords: String,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            crate_version: env!("CARGO_PKG_VERSION").to_owned(),
            bundle_format: BUNDLE_FORMAT_VERSION,
            stopwords: STOPWORDS_VERSION.to_owned(),
        }
    }
}

/// Loads the labeled file of a dataset. The label merge is applied unless
/// `raw_labels` is set.
pub fn load_dataset(m: &DatasetManifest, data_dir: &Path, raw_labels: bool) -> Result<(LabeledDataset, LoadReport)> {
    let path = m.locate_train(data_dir)?;
    let outcome = load_csv(&path, &m.schema)?;
    let ds = match (&m.label_merge, raw_labels) {
        (Some(merge), false) => map_labels(&outcome.dataset, merge)?,
        _ => outcome.dataset,
    };
    Ok((ds, outcome.report))
}

/// Row indices of `holdout` mapped onto the bundle's class list.
fn holdout_indices(classes: &[String], holdout: &LabeledDataset) -> Result<Vec<usize>> {
    holdout
        .documents()
        .iter()
        .map(|d| {
            classes
                .iter()
                .position(|c| *c == d.label)
                .ok_or_else(|| Error::UnknownLabel(d.label.clone()))
        })
        .collect()
}

fn predictions(pipeline: &FittedPipeline<f64>, ds: &LabeledDataset) -> Vec<(usize, Vec<f64>)> {
    pipeline.predict_many(&tokenize_dataset(ds, &pipeline.config.prep))
}

/// Applies the bundle's frozen preprocessing and vocabulary to every holdout
/// document and scores the predictions.
pub fn evaluate_pipeline(bundle: &ModelBundle, holdout: &LabeledDataset) -> Result<EvalReport> {
    evaluate_fitted(&bundle.pipeline, holdout)
}

fn evaluate_fitted(pipeline: &FittedPipeline<f64>, holdout: &LabeledDataset) -> Result<EvalReport> {
    if holdout.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let truth = holdout_indices(pipeline.classes(), holdout)?;
    let pred: Vec<usize> = predictions(pipeline, holdout).into_iter().map(|p| p.0).collect();
    compute_report_indices(&truth, &pred, pipeline.classes())
}

/// Class probabilities; naive Bayes log-scores are normalized with softmax.
pub fn class_probabilities(model: &Model<f64>, scores: &[f64]) -> Vec<f64> {
    match model {
        Model::Mnb(_) => softmax(scores),
        Model::LogReg(_) => scores.to_vec(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MisclassifiedRow {
    pub id: String,
    pub text: String,
    pub true_label: String,
    pub predicted_label: String,
    /// Probability of the predicted class.
    pub confidence: f64,
}

/// The `n` misclassified holdout rows with the most confident predictions,
/// most confident first; ties keep document order.
pub fn dump_errors(bundle: &ModelBundle, holdout: &LabeledDataset, n: usize) -> Result<Vec<MisclassifiedRow>> {
    if n == 0 {
        return Err(Error::InvalidConfig("error count must be at least 1".into()));
    }
    let classes = bundle.classes();
    let truth = holdout_indices(classes, holdout)?;
    let preds = predictions(&bundle.pipeline, holdout);
    let mut rows: Vec<MisclassifiedRow> = holdout
        .documents()
        .iter()
        .zip(truth)
        .zip(preds)
        .filter(|((_, t), (p, _))| t != p)
        .map(|((d, t), (p, scores))| MisclassifiedRow {
            id: d.id.clone(),
            text: d.text.clone(),
            true_label: classes[t].clone(),
            predicted_label: classes[p].clone(),
            confidence: class_probabilities(&bundle.pipeline.model, &scores)[p],
        })
        .collect();
    rows.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));
    rows.truncate(n);
    Ok(rows)
}

pub const NEWS_LABEL: &str = "News";
pub const NON_NEWS_LABEL: &str = "Non-news";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoStageResult {
    pub two_stage: EvalReport,
    pub single_stage: EvalReport,
    /// Holdout rows the first stage sent to `News`.
    pub predicted_news: usize,
}

/// Same schema minus `News`, keeping the decoder entries of the other labels.
fn sentiment_schema(schema: &LabelSchema) -> Result<LabelSchema> {
    let labels: Vec<String> = schema.labels().iter().filter(|l| *l != NEWS_LABEL).cloned().collect();
    let decoder = schema
        .decoder()
        .iter()
        .filter(|(_, l)| *l != NEWS_LABEL)
        .map(|(r, l)| (r.clone(), l.clone()))
        .collect();
    LabelSchema::new(schema.name(), labels, schema.columns().clone(), decoder)
}

/// News/non-news classifier followed by a sentiment classifier trained on
/// non-news rows, compared with one classifier over all classes.
pub fn run_two_stage(
    train: &LabeledDataset,
    holdout: &LabeledDataset,
    config: &PipelineConfig,
) -> Result<TwoStageResult> {
    let schema = train.schema();
    if schema.labels() != holdout.schema().labels() {
        return Err(Error::SchemaMismatch("train and holdout label lists differ".into()));
    }
    let news = schema
        .label_index(NEWS_LABEL)
        .ok_or_else(|| Error::SchemaMismatch(format!("schema `{}` has no `{NEWS_LABEL}` class", schema.name())))?;
    if schema.labels().len() < 3 {
        return Err(Error::SchemaMismatch("need at least two classes besides News".into()));
    }
    let binary: IndexMap<String, String> = schema
        .labels()
        .iter()
        .map(|l| {
            let to = if l == NEWS_LABEL { NEWS_LABEL } else { NON_NEWS_LABEL };
            (l.clone(), to.to_owned())
        })
        .collect();
    let stage1 = fit::<f64>(&map_labels(train, &binary)?, config)?;
    let stage1_news = stage1
        .classes()
        .iter()
        .position(|c| c == NEWS_LABEL)
        .expect("binary schema keeps News");

    let rest: Vec<_> = train
        .documents()
        .iter()
        .filter(|d| d.label != NEWS_LABEL)
        .cloned()
        .collect();
    let stage2_train = LabeledDataset::new(sentiment_schema(schema)?, rest)?;
    let stage2 = fit::<f64>(&stage2_train, config)?;
    let single = fit::<f64>(train, config)?;

    let tokens = tokenize_dataset(holdout, &config.prep);
    let truth = holdout.label_indices();
    let mut predicted_news = 0;
    let cascade: Vec<usize> = tokens
        .iter()
        .map(|t| {
            if stage1.predict_tokens(t).0 == stage1_news {
                predicted_news += 1;
                news
            } else {
                let label = &stage2.classes()[stage2.predict_tokens(t).0];
                schema.label_index(label).expect("stage-2 labels come from the schema")
            }
        })
        .collect();
    let flat: Vec<usize> = single.predict_many(&tokens).into_iter().map(|p| p.0).collect();
    Ok(TwoStageResult {
        two_stage: compute_report_indices(&truth, &cascade, schema.labels())?,
        single_stage: compute_report_indices(&truth, &flat, schema.labels())?,
        predicted_news,
    })
}

/// Writes `id,target` rows with the raw label codes of `schema`.
pub fn write_submission(
    pipeline: &FittedPipeline<f64>,
    schema: &LabelSchema,
    rows: &[UnlabeledRow],
    path: &Path,
) -> Result<()> {
    let texts: Vec<&str> = rows.iter().map(|r| r.text.as_str()).collect();
    let preds = pipeline.predict_many(&tokenize_corpus(&texts, &pipeline.config.prep));
    let mut out = String::from("id,target\n");
    for (row, (k, _)) in rows.iter().zip(preds) {
        let label = &pipeline.classes()[k];
        let code = schema.encode(label).unwrap_or(label);
        quote_csv_field(&mut out, &row.id);
        out.push(',');
        quote_csv_field(&mut out, code);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub scoring: Scoring,
    pub folds: usize,
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl From<&CvResult> for CvSummary {
    fn from(r: &CvResult) -> Self {
        CvSummary {
            scoring: r.scoring,
            folds: r.fold_scores.len(),
            fold_scores: r.fold_scores.clone(),
            mean: r.mean,
            std: r.std,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub name: String,
    pub protocol: String,
    pub config: PipelineConfig,
    pub report: Option<EvalReport>,
    pub cv: Option<CvSummary>,
}

/// One observed score beside its published counterpart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub key: String,
    pub observed: Option<f64>,
    pub reference: f64,
    pub band: Option<Band>,
    /// `None` when the row has no band or nothing was observed.
    pub pass: Option<bool>,
    pub citation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportedConstant {
    #[serde(flatten)]
    pub constant: PublishedConstant,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproductionReport {
    pub dataset: DatasetId,
    pub seed: u64,
    pub n_documents: usize,
    pub experiments: Vec<ExperimentRecord>,
    pub references: Vec<Comparison>,
    pub published_constants: Vec<ReportedConstant>,
    pub notes: Vec<String>,
    pub versions: Versions,
}

impl ReproductionReport {
    /// True when every banded comparison passed.
    pub fn all_within_bands(&self) -> bool {
        self.references.iter().all(|c| c.pass != Some(false))
    }

    pub fn failures(&self) -> Vec<&Comparison> {
        self.references.iter().filter(|c| c.pass == Some(false)).collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "dataset: {}  seed: {}  documents: {}\n\n",
            self.dataset, self.seed, self.n_documents
        );
        for e in &self.experiments {
            let _ = writeln!(out, "== {} ({})", e.name, e.protocol);
            let _ = writeln!(out, "config: {}", e.config.summary());
            if let Some(r) = &e.report {
                out.push_str(&r.render_table());
            }
            if let Some(cv) = &e.cv {
                let _ = writeln!(
                    out,
                    "{}-fold {}: mean {:.4}, std {:.4}",
                    cv.folds, cv.scoring, cv.mean, cv.std
                );
            }
            out.push('\n');
        }
        let width = self.references.iter().map(|c| c.key.len()).max().unwrap_or(3).max(3);
        let _ = writeln!(
            out,
            "{:<width$}  {:>8}  {:>9}  {:<16}  {:<6}  source",
            "key", "observed", "reference", "band", "status"
        );
        for c in &self.references {
            let observed = c.observed.map_or("-".to_owned(), |v| format!("{v:.4}"));
            let band = c.band.map_or("-".to_owned(), |b| b.to_string());
            let status = match c.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "info",
            };
            let _ = writeln!(
                out,
                "{:<width$}  {observed:>8}  {:>9.3}  {band:<16}  {status:<6}  {}",
                c.key, c.reference, c.citation
            );
        }
        out.push('\n');
        let _ = writeln!(out, "BERT scores ({PUBLISHED_LABEL}):");
        for p in &self.published_constants {
            let _ = writeln!(
                out,
                "  {}: {} = {:.3}  [{}; {}]",
                p.constant.model, p.constant.metric, p.constant.value, p.label, p.constant.citation
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproduceOptions {
    pub seed: u64,
    pub folds: usize,
    /// Also run the five-class coronavirus model.
    pub five_class: bool,
    /// Where to write the competition submission, when the dataset has a test file.
    pub submission_path: Option<PathBuf>,
}

impl ReproduceOptions {
    pub fn new(seed: u64) -> Self {
        ReproduceOptions {
            seed,
            folds: 10,
            five_class: true,
            submission_path: None,
        }
    }
}

/// Chosen configs use the run seed for any randomized initialization.
fn seeded(config: &PipelineConfig, seed: u64) -> PipelineConfig {
    let mut c = config.clone();
    if let ModelSpec::LogReg(t) = &mut c.model {
        t.seed = seed;
    }
    c
}

struct Runner {
    seed: u64,
    folds: usize,
    experiments: Vec<ExperimentRecord>,
    observed: IndexMap<String, f64>,
}

impl Runner {
    fn holdout(
        &mut self,
        name: &str,
        train: &LabeledDataset,
        holdout: &LabeledDataset,
        config: &PipelineConfig,
    ) -> Result<EvalReport> {
        let config = seeded(config, self.seed);
        let fitted = fit::<f64>(train, &config)?;
        let report = evaluate_fitted(&fitted, holdout)?;
        self.record_holdout(name, &config, report.clone());
        Ok(report)
    }

    fn record_holdout(&mut self, name: &str, config: &PipelineConfig, report: EvalReport) {
        self.observed
            .insert(format!("{name}.holdout.weighted_f1"), report.weighted.f1);
        self.observed
            .insert(format!("{name}.holdout.macro_f1"), report.macro_avg.f1);
        self.observed
            .insert(format!("{name}.holdout.accuracy"), report.accuracy);
        self.experiments.push(ExperimentRecord {
            name: name.to_owned(),
            protocol: format!("train/holdout split, {} held out", holdout_share(&report)),
            config: config.clone(),
            report: Some(report),
            cv: None,
        });
    }

    fn cv(&mut self, name: &str, ds: &LabeledDataset, config: &PipelineConfig, scoring: Scoring) -> Result<()> {
        let config = seeded(config, self.seed);
        let folds = FoldSpec::new(self.folds, self.seed);
        let cv = kfold_cv(ds, &config, &folds, scoring)?;
        // Every scoring comes from the same fold reports; `scoring` only picks the summary.
        for s in [Scoring::Accuracy, Scoring::MacroF1, Scoring::WeightedF1] {
            let mean = cv.reports.iter().map(|r| s.score(r)).sum::<f64>() / cv.reports.len() as f64;
            self.observed.insert(format!("{name}.cv.{s}"), mean);
        }
        self.experiments.push(ExperimentRecord {
            name: name.to_owned(),
            protocol: format!("stratified {}-fold cross-validation", self.folds),
            config,
            report: None,
            cv: Some(CvSummary::from(&cv)),
        });
        Ok(())
    }

    fn derived(&mut self, key: &str, a: &str, b: &str) {
        if let (Some(x), Some(y)) = (self.observed.get(a), self.observed.get(b)) {
            self.observed.insert(key.to_owned(), x - y);
        }
    }
}

fn holdout_share(report: &EvalReport) -> String {
    format!("{} rows", report.confusion.total())
}

/// Runs the manifest's baseline and tuned configurations for one dataset and
/// compares each score against its published value.
pub fn reproduce(id: DatasetId, data_dir: &Path, opts: &ReproduceOptions) -> Result<ReproductionReport> {
    let m = manifest(id);
    let (raw, _) = load_dataset(&m, data_dir, true)?;
    let mut run = Runner {
        seed: opts.seed,
        folds: opts.folds,
        experiments: Vec::new(),
        observed: IndexMap::new(),
    };
    let mut notes = m.notes.clone();
    let split = SplitSpec::new(m.holdout_fraction, opts.seed)?;
    match id {
        DatasetId::Climate => {
            let (train, holdout) = stratified_split(&raw, &split)?;
            run.holdout("baseline", &train, &holdout, &m.baseline)?;
            let mut tfidf = m.baseline.clone();
            tfidf.weighting = Weighting::Tfidf;
            run.holdout("baseline_tfidf", &train, &holdout, &tfidf)?;
            run.derived(
                "tfidf_gap.holdout.weighted_f1",
                "baseline.holdout.weighted_f1",
                "baseline_tfidf.holdout.weighted_f1",
            );
            run.cv("tuned", &train, &m.tuned, Scoring::WeightedF1)?;
            let tuned = seeded(&m.tuned, opts.seed);
            let two = run_two_stage(&train, &holdout, &tuned)?;
            run.record_holdout("tuned", &tuned, two.single_stage.clone());
            run.record_holdout("two_stage", &tuned, two.two_stage.clone());
            run.derived(
                "two_stage_gap.holdout.weighted_f1",
                "two_stage.holdout.weighted_f1",
                "tuned.holdout.weighted_f1",
            );
        }
        DatasetId::Coronavirus => {
            let merge = m.label_merge.as_ref().expect("coronavirus merges classes");
            let (train5, holdout5) = stratified_split(&raw, &split)?;
            let train = map_labels(&train5, merge)?;
            let holdout = map_labels(&holdout5, merge)?;
            run.holdout("baseline", &train, &holdout, &m.baseline)?;
            run.holdout("tuned", &train, &holdout, &m.tuned)?;
            run.cv("tuned", &train, &m.tuned, Scoring::WeightedF1)?;
            if opts.five_class {
                run.holdout("tuned_5class", &train5, &holdout5, &m.tuned)?;
            } else {
                notes.push("five-class run skipped".into());
            }
        }
        DatasetId::Disaster => {
            run.cv("baseline", &raw, &m.baseline, Scoring::Accuracy)?;
            run.cv("tuned", &raw, &m.tuned, Scoring::Accuracy)?;
            let mut mnb = m.tuned.clone();
            mnb.model = ModelSpec::mnb();
            run.cv("tuned_mnb", &raw, &mnb, Scoring::Accuracy)?;
            match &opts.submission_path {
                Some(path) => {
                    let test = m.locate_test(data_dir)?.expect("disaster ships a test file");
                    let rows = load_unlabeled_csv(&test, &m.schema)?;
                    let bundle = fit_pipeline(&raw, &seeded(&m.tuned, opts.seed))?;
                    write_submission(&bundle.pipeline, &m.schema, &rows, path)?;
                    notes.push(format!(
                        "submission with {} rows written to {}; it is scored only by the competition",
                        rows.len(),
                        path.display()
                    ));
                }
                None => notes.push("no submission requested; competition accuracy is not computed".into()),
            }
        }
    }
    let references = m
        .references
        .iter()
        .map(|r| {
            let observed = run.observed.get(&r.key).copied();
            Comparison {
                key: r.key.clone(),
                observed,
                reference: r.reference,
                band: r.band,
                pass: match (r.band, observed) {
                    (Some(b), Some(v)) => Some(b.contains(v)),
                    _ => None,
                },
                citation: r.citation.clone(),
            }
        })
        .collect();
    Ok(ReproductionReport {
        dataset: id,
        seed: opts.seed,
        n_documents: raw.len(),
        experiments: run.experiments,
        references,
        published_constants: m
            .published_constants
            .iter()
            .map(|c| ReportedConstant {
                constant: c.clone(),
                label: PUBLISHED_LABEL.to_owned(),
            })
            .collect(),
        notes,
        versions: Versions::current(),
    })
}

/// Single-run JSON document: `{dataset, config, report, references, seed, versions}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalDocument {
    pub dataset: String,
    pub config: PipelineConfig,
    pub report: EvalReport,
    pub references: Vec<Comparison>,
    pub seed: u64,
    pub versions: Versions,
}

/// Holdout references that apply to `config`, matched against the canned
/// baseline and tuned configurations of the named dataset.
pub fn holdout_references(dataset: &str, config: &PipelineConfig, report: &EvalReport) -> Vec<Comparison> {
    let Ok(id) = dataset.parse::<DatasetId>() else {
        return Vec::new();
    };
    let m = manifest(id);
    let strip = |c: &PipelineConfig| seeded(c, 0);
    let prefix = if strip(config) == strip(&m.baseline) {
        "baseline"
    } else if strip(config) == strip(&m.tuned) {
        if report.per_class.len() == m.schema.labels().len() && m.label_merge.is_some() {
            "tuned_5class"
        } else {
            "tuned"
        }
    } else {
        return Vec::new();
    };
    let observed = [
        ("weighted_f1", report.weighted.f1),
        ("macro_f1", report.macro_avg.f1),
        ("accuracy", report.accuracy),
    ];
    observed
        .iter()
        .filter_map(|(metric, v)| {
            let r = m.reference(&format!("{prefix}.holdout.{metric}"))?;
            Some(Comparison {
                key: r.key.clone(),
                observed: Some(*v),
                reference: r.reference,
                band: r.band,
                pass: r.band.map(|b| b.contains(*v)),
                citation: r.citation.clone(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::app::manifest::baseline_config;
    use crate::corpus::{ColumnMap, Document};

    fn schema(labels: &[&str]) -> LabelSchema {
        let labels: Vec<String> = labels.iter().map(|s| (*s).to_owned()).collect();
        LabelSchema::new(
            "t",
            labels.clone(),
            ColumnMap::new(None, "text", "label"),
            LabelSchema::identity_decoder(&labels),
        )
        .unwrap()
    }

    fn ds(labels: &[&str], rows: &[(&str, &str)]) -> LabeledDataset {
        let docs = rows
            .iter()
            .enumerate()
            .map(|(i, (t, l))| Document::new(i.to_string(), *t, *l))
            .collect();
        LabeledDataset::new(schema(labels), docs).unwrap()
    }

    fn climate_like() -> LabeledDataset {
        let mut rows = Vec::new();
        for i in 0..6 {
            rows.push((["storm hoax scam", "hoax lies scam", "fake hoax"][i % 3], "Anti"));
            rows.push((["maybe weather", "weather today", "maybe today"][i % 3], "Neutral"));
            rows.push((["act now planet", "save planet", "planet act"][i % 3], "Pro"));
            rows.push((["report says study", "study report", "breaking report"][i % 3], "News"));
        }
        ds(&["Anti", "Neutral", "Pro", "News"], &rows)
    }

    #[test]
    fn evaluation_rejects_unknown_holdout_label() {
        let train = ds(&["a", "b"], &[("x", "a"), ("y", "b")]);
        let b = fit_pipeline(&train, &baseline_config()).unwrap();
        let bad = ds(&["a", "c"], &[("x", "c")]);
        assert!(matches!(evaluate_pipeline(&b, &bad), Err(Error::UnknownLabel(l)) if l == "c"));
        assert_eq!(evaluate_pipeline(&b, &train).unwrap().accuracy, 1.0);
    }

    #[test]
    fn perfect_classifier_has_no_errors() {
        let train = ds(&["a", "b"], &[("x x", "a"), ("y y", "b")]);
        let b = fit_pipeline(&train, &baseline_config()).unwrap();
        assert!(dump_errors(&b, &train, 5).unwrap().is_empty());
        let swapped = ds(&["a", "b"], &[("x", "b"), ("y", "a"), ("x x x", "b")]);
        let errs = dump_errors(&b, &swapped, 10).unwrap();
        assert_eq!(errs.len(), 3);
        assert!(errs.iter().all(|e| e.true_label != e.predicted_label));
        assert!(errs.windows(2).all(|w| w[0].confidence >= w[1].confidence));
        assert_eq!(errs[0].text, "x x x");
        assert_eq!(dump_errors(&b, &swapped, 1).unwrap().len(), 1);
        assert!(dump_errors(&b, &swapped, 0).is_err());
    }

    #[test]
    fn two_stage_covers_original_classes() {
        let data = climate_like();
        let r = run_two_stage(&data, &data, &baseline_config()).unwrap();
        let classes: Vec<&str> = r.two_stage.classes().collect();
        assert_eq!(classes, ["Anti", "Neutral", "Pro", "News"]);
        let news = 3;
        let predicted_news: u64 = (0..4).map(|t| r.two_stage.confusion.get(t, news)).sum();
        assert_eq!(predicted_news as usize, r.predicted_news);
        let other = ds(&["a", "b"], &[("x", "a"), ("y", "b")]);
        assert!(matches!(
            run_two_stage(&other, &other, &baseline_config()),
            Err(Error::SchemaMismatch(_))
        ));
    }
}
