//! Command-line front end. `run` is the whole program; `main` only wires
//! process streams and the exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tweetclass::app::{
    class_probabilities, dump_errors, evaluate_pipeline, fit_pipeline, holdout_references, load_bundle, load_dataset,
    manifest, reproduce, save_bundle, write_submission, DatasetId, DatasetManifest, EvalDocument, ModelBundle,
    ReproduceOptions, Versions,
};
use tweetclass::corpus::{
    class_distribution, load_csv, load_unlabeled_csv, map_labels, stratified_split, write_csv, LabeledDataset,
    SplitSpec, DEFAULT_SEED,
};
use tweetclass::eval::{grid_search, kfold_cv, FoldSpec, GridSpec, Scoring};
use tweetclass::features::NgramRange;
use tweetclass::models::{ClassWeights, Penalty};
use tweetclass::pipeline::{ModelSpec, PipelineConfig};
use tweetclass::textprep::{preprocess, trace, PrepConfig, ENGLISH_STOPWORDS, STOPWORDS_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_BAND: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "tweetclass",
    version,
    about = "Tweet classification experiments with bag-of-words models"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Seed for splits, folds, and initialization [default: 42]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit one JSON document instead of tables
    #[arg(long, global = true)]
    json: bool,
    /// Directory holding the dataset CSV files
    #[arg(long, global = true, env = "TWEETCLS_DATA_DIR", default_value = "data")]
    data_dir: PathBuf,
    /// Worker threads for parallel stages (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load a dataset and show row counts and class distribution
    Inspect {
        dataset: String,
        /// Keep the original classes instead of the evaluated merge
        #[arg(long)]
        raw_labels: bool,
    },
    /// Write stratified train and holdout CSV files
    Split {
        dataset: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        holdout: Option<f64>,
        #[arg(long)]
        raw_labels: bool,
    },
    /// Fit a pipeline and save it as a bundle
    Train {
        dataset: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        /// Fit on every row instead of the training split
        #[arg(long)]
        full: bool,
        #[arg(long)]
        raw_labels: bool,
    },
    /// Score a bundle on the holdout split or a labeled file
    Eval {
        dataset: String,
        #[arg(long)]
        bundle: PathBuf,
        /// Labeled CSV to score instead of the seeded holdout split
        #[arg(long)]
        holdout_file: Option<PathBuf>,
    },
    /// Stratified k-fold cross-validation of one configuration
    Cv {
        dataset: String,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, value_enum)]
        scoring: Option<ScoringArg>,
        #[arg(long)]
        raw_labels: bool,
        /// Cross-validate every row instead of the training split
        #[arg(long)]
        full: bool,
    },
    /// Exhaustive cross-validated search over configuration axes
    Grid {
        dataset: String,
        #[command(flatten)]
        config: ConfigArg,
        /// JSON grid file; a default search is used when absent
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, value_enum)]
        scoring: Option<ScoringArg>,
        #[arg(long)]
        raw_labels: bool,
    },
    /// Classify texts or an unlabeled CSV with a saved bundle
    Predict {
        #[arg(long)]
        bundle: PathBuf,
        /// Unlabeled CSV in the bundle dataset's layout
        #[arg(long)]
        input: Option<PathBuf>,
        /// Submission file (`id,target`) for `--input`
        #[arg(long, requires = "input")]
        out: Option<PathBuf>,
        texts: Vec<String>,
    },
    /// Run the canned baseline and tuned experiments and compare with published scores
    Reproduce {
        dataset: String,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Skip the five-class coronavirus run
        #[arg(long)]
        no_five_class: bool,
        /// Write the competition submission here (disaster only)
        #[arg(long)]
        submission: Option<PathBuf>,
    },
    /// List the most confident misclassifications on the holdout split
    Errors {
        dataset: String,
        #[arg(long)]
        bundle: PathBuf,
        #[arg(short = 'n', long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        holdout_file: Option<PathBuf>,
    },
    /// Show preprocessing output, per-stage traces, or the stopword list
    Prep {
        #[arg(long)]
        show_stopwords: bool,
        /// Print every intermediate stage
        #[arg(long)]
        trace: bool,
        /// `raw`, `full`, or a dataset name for its tuned preprocessing
        #[arg(long, default_value = "full")]
        preset: String,
        texts: Vec<String>,
    },
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// `baseline`, `tuned`, or a path to a JSON pipeline configuration
    #[arg(long, default_value = "tuned")]
    config: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScoringArg {
    Accuracy,
    MacroF1,
    WeightedF1,
}

impl From<ScoringArg> for Scoring {
    fn from(s: ScoringArg) -> Self {
        match s {
            ScoringArg::Accuracy => Scoring::Accuracy,
            ScoringArg::MacroF1 => Scoring::MacroF1,
            ScoringArg::WeightedF1 => Scoring::WeightedF1,
        }
    }
}

enum Failure {
    Usage(String),
    Data(tweetclass::Error),
    Band(String),
}

impl From<tweetclass::Error> for Failure {
    fn from(e: tweetclass::Error) -> Self {
        match e {
            tweetclass::Error::UnknownDataset { .. } => Failure::Usage(e.to_string()),
            e => Failure::Data(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(tweetclass::Error::InvalidDataset(format!("write failed: {e}")))
    }
}

type Outcome = Result<(), Failure>;

/// Parses `argv` (program name first) and runs one command. Results go to
/// `out`, diagnostics to `err`; the return value is the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if argv.len() <= 1 {
        use clap::CommandFactory;
        let _ = write!(err, "{}", Cli::command().render_help());
        return EXIT_USAGE;
    }
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start {} worker threads: {e}", cli.jobs);
            return EXIT_USAGE;
        }
    };
    // Streams need not be `Send`, so output is buffered inside the pool.
    let (mut buf_out, mut buf_err) = (Vec::new(), Vec::new());
    let result = pool.install(|| dispatch(&cli, &mut buf_out, &mut buf_err));
    let _ = out.write_all(&buf_out);
    let _ = err.write_all(&buf_err);
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
        Err(Failure::Band(m)) => {
            let _ = writeln!(err, "{m}");
            EXIT_BAND
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let ctx = Ctx {
        seed,
        json: cli.json,
        data_dir: &cli.data_dir,
    };
    match &cli.command {
        Command::Inspect { dataset, raw_labels } => ctx.inspect(dataset, *raw_labels, out),
        Command::Split {
            dataset,
            out: dir,
            holdout,
            raw_labels,
        } => ctx.split(dataset, dir, *holdout, *raw_labels, out),
        Command::Train {
            dataset,
            out: path,
            config,
            full,
            raw_labels,
        } => ctx.train(dataset, path, &config.config, *full, *raw_labels, out),
        Command::Eval {
            dataset,
            bundle,
            holdout_file,
        } => ctx.eval(dataset, bundle, holdout_file.as_deref(), cli.seed, out),
        Command::Cv {
            dataset,
            config,
            folds,
            scoring,
            raw_labels,
            full,
        } => ctx.cv(dataset, &config.config, *folds, *scoring, *raw_labels, *full, out),
        Command::Grid {
            dataset,
            config,
            grid,
            folds,
            scoring,
            raw_labels,
        } => ctx.grid(
            dataset,
            &config.config,
            grid.as_deref(),
            *folds,
            *scoring,
            *raw_labels,
            out,
            err,
        ),
        Command::Predict {
            bundle,
            input,
            out: dest,
            texts,
        } => ctx.predict(bundle, input.as_deref(), dest.as_deref(), texts, out),
        Command::Reproduce {
            dataset,
            folds,
            no_five_class,
            submission,
        } => ctx.reproduce(dataset, *folds, !*no_five_class, submission.clone(), out, err),
        Command::Errors {
            dataset,
            bundle,
            count,
            holdout_file,
        } => ctx.errors(dataset, bundle, *count, holdout_file.as_deref(), cli.seed, out),
        Command::Prep {
            show_stopwords,
            trace: show_trace,
            preset,
            texts,
        } => ctx.prep(*show_stopwords, *show_trace, preset, texts, out),
    }
}

struct Ctx<'a> {
    seed: u64,
    json: bool,
    data_dir: &'a Path,
}

fn emit_json(out: &mut dyn Write, v: &impl serde::Serialize) -> Outcome {
    let s = serde_json::to_string_pretty(v).map_err(tweetclass::Error::from)?;
    writeln!(out, "{s}")?;
    Ok(())
}

fn dataset_id(name: &str) -> Result<DatasetId, Failure> {
    Ok(name.parse::<DatasetId>()?)
}

fn with_seed(mut cfg: PipelineConfig, seed: u64) -> PipelineConfig {
    if let ModelSpec::LogReg(t) = &mut cfg.model {
        t.seed = seed;
    }
    cfg
}

impl Ctx<'_> {
    fn load(&self, m: &DatasetManifest, raw_labels: bool) -> Result<LabeledDataset, Failure> {
        Ok(load_dataset(m, self.data_dir, raw_labels)?.0)
    }

    fn split_parts(
        &self,
        m: &DatasetManifest,
        ds: &LabeledDataset,
        fraction: Option<f64>,
    ) -> Result<(LabeledDataset, LabeledDataset), Failure> {
        let spec = SplitSpec::new(fraction.unwrap_or(m.holdout_fraction), self.seed)?;
        Ok(stratified_split(ds, &spec)?)
    }

    fn config(&self, m: &DatasetManifest, which: &str) -> Result<PipelineConfig, Failure> {
        let cfg = match which {
            "baseline" => m.baseline.clone(),
            "tuned" => m.tuned.clone(),
            path => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read config `{path}`: {e}")))?;
                let cfg: PipelineConfig =
                    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid config `{path}`: {e}")))?;
                cfg.validate()?;
                cfg
            }
        };
        Ok(with_seed(cfg, self.seed))
    }

    fn inspect(&self, name: &str, raw_labels: bool, out: &mut dyn Write) -> Outcome {
        let m = manifest(dataset_id(name)?);
        let path = m.locate_train(self.data_dir)?;
        let outcome = load_csv(&path, &m.schema)?;
        let report = outcome.report;
        let ds = match (&m.label_merge, raw_labels) {
            (Some(merge), false) => map_labels(&outcome.dataset, merge)?,
            _ => outcome.dataset,
        };
        let dist = class_distribution(&ds)?;
        let counts = ds.class_counts();
        if self.json {
            let classes: Vec<Value> = ds
                .schema()
                .labels()
                .iter()
                .zip(&counts)
                .map(|(l, c)| json!({"label": l, "count": c, "share": dist[l]}))
                .collect();
            return emit_json(
                out,
                &json!({
                    "dataset": m.id,
                    "file": path.display().to_string(),
                    "encoding": report.encoding,
                    "records": report.records,
                    "accepted": report.accepted,
                    "rejected": report.rejected.len(),
                    "duplicate_ids": report.duplicate_ids().len(),
                    "classes": classes,
                    "published_distribution": m.published_distribution,
                }),
            );
        }
        writeln!(
            out,
            "dataset: {}  file: {}  encoding: {}",
            m.id,
            path.display(),
            report.encoding
        )?;
        writeln!(
            out,
            "records: {}  accepted: {}  rejected: {}  duplicate ids: {}",
            report.records,
            report.accepted,
            report.rejected.len(),
            report.duplicate_ids().len()
        )?;
        let width = ds.schema().labels().iter().map(|l| l.len()).max().unwrap_or(5).max(5);
        writeln!(
            out,
            "{:<width$}  {:>7}  {:>7}  {:>9}",
            "Class", "Count", "Share", "Published"
        )?;
        for (l, c) in ds.schema().labels().iter().zip(&counts) {
            let published = m
                .published_distribution
                .get(l)
                .map_or("-".to_owned(), |p| format!("{:.1}%", p * 100.0));
            writeln!(out, "{l:<width$}  {c:>7}  {:>6.1}%  {published:>9}", dist[l] * 100.0)?;
        }
        Ok(())
    }

    fn split(&self, name: &str, dir: &Path, fraction: Option<f64>, raw_labels: bool, out: &mut dyn Write) -> Outcome {
        let m = manifest(dataset_id(name)?);
        let ds = self.load(&m, raw_labels)?;
        let (train, holdout) = self.split_parts(&m, &ds, fraction)?;
        std::fs::create_dir_all(dir)?;
        let tp = dir.join("train.csv");
        let hp = dir.join("holdout.csv");
        write_csv(&train, &tp)?;
        write_csv(&holdout, &hp)?;
        if self.json {
            return emit_json(
                out,
                &json!({
                    "dataset": m.id, "seed": self.seed,
                    "train": {"path": tp.display().to_string(), "rows": train.len()},
                    "holdout": {"path": hp.display().to_string(), "rows": holdout.len()},
                }),
            );
        }
        writeln!(out, "train: {} rows -> {}", train.len(), tp.display())?;
        writeln!(out, "holdout: {} rows -> {}", holdout.len(), hp.display())?;
        Ok(())
    }

    fn train(
        &self,
        name: &str,
        path: &Path,
        which: &str,
        full: bool,
        raw_labels: bool,
        out: &mut dyn Write,
    ) -> Outcome {
        let m = manifest(dataset_id(name)?);
        let cfg = self.config(&m, which)?;
        let ds = self.load(&m, raw_labels)?;
        let train = if full { ds } else { self.split_parts(&m, &ds, None)?.0 };
        let mut bundle = fit_pipeline(&train, &cfg)?;
        bundle.metadata.seed = self.seed;
        save_bundle(&bundle, path)?;
        let diag = bundle.pipeline.model.diagnostics().cloned();
        if self.json {
            return emit_json(
                out,
                &json!({
                    "dataset": m.id,
                    "bundle": path.display().to_string(),
                    "config": cfg,
                    "rows": train.len(),
                    "vocabulary": bundle.pipeline.vocabulary.len(),
                    "diagnostics": diag,
                    "seed": self.seed,
                    "versions": Versions::current(),
                }),
            );
        }
        writeln!(out, "config: {}", cfg.summary())?;
        writeln!(
            out,
            "trained on {} rows, {} features -> {}",
            train.len(),
            bundle.pipeline.vocabulary.len(),
            path.display()
        )?;
        if let Some(d) = diag {
            writeln!(
                out,
                "optimizer: {} iterations, converged: {}, loss {:.6}, gradient norm {:.2e}",
                d.iterations, d.converged, d.loss, d.grad_inf_norm
            )?;
        }
        Ok(())
    }

    /// Holdout for a bundle: a labeled file, else the seeded split. The
    /// label merge is skipped when the bundle was fit on the original classes.
    fn holdout_for(
        &self,
        m: &DatasetManifest,
        bundle: &ModelBundle,
        file: Option<&Path>,
        seed: Option<u64>,
    ) -> Result<LabeledDataset, Failure> {
        let raw_labels = bundle.classes() == m.schema.labels();
        if let Some(f) = file {
            let ds = load_csv(f, &m.schema)?.dataset;
            return Ok(match (&m.label_merge, raw_labels) {
                (Some(merge), false) => map_labels(&ds, merge)?,
                _ => ds,
            });
        }
        let ds = self.load(m, raw_labels)?;
        let seed = seed.unwrap_or(bundle.metadata.seed);
        let spec = SplitSpec::new(m.holdout_fraction, seed)?;
        Ok(stratified_split(&ds, &spec)?.1)
    }

    fn eval(&self, name: &str, path: &Path, file: Option<&Path>, seed: Option<u64>, out: &mut dyn Write) -> Outcome {
        let m = manifest(dataset_id(name)?);
        let bundle = load_bundle(path)?;
        let holdout = self.holdout_for(&m, &bundle, file, seed)?;
        let report = evaluate_pipeline(&bundle, &holdout)?;
        let references = holdout_references(m.id.name(), bundle.config(), &report);
        if self.json {
            return emit_json(
                out,
                &EvalDocument {
                    dataset: m.id.name().to_owned(),
                    config: bundle.config().clone(),
                    report,
                    references,
                    seed: seed.unwrap_or(bundle.metadata.seed),
                    versions: Versions::current(),
                },
            );
        }
        writeln!(out, "config: {}", bundle.config().summary())?;
        write!(out, "{}", report.render_table())?;
        for r in references {
            let status = match r.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "info",
            };
            writeln!(
                out,
                "{}: observed {:.4}, published {:.3} [{status}]",
                r.key,
                r.observed.unwrap_or(f64::NAN),
                r.reference
            )?;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn cv(
        &self,
        name: &str,
        which: &str,
        folds: usize,
        scoring: Option<ScoringArg>,
        raw_labels: bool,
        full: bool,
        out: &mut dyn Write,
    ) -> Outcome {
        let m = manifest(dataset_id(name)?);
        let cfg = self.config(&m, which)?;
        let ds = self.load(&m, raw_labels)?;
        let data = if full || m.id == DatasetId::Disaster {
            ds
        } else {
            self.split_parts(&m, &ds, None)?.0
        };
        let scoring = scoring.map(Scoring::from).unwrap_or(default_scoring(m.id));
        let cv = kfold_cv(&data, &cfg, &FoldSpec::new(folds, self.seed), scoring)?;
        if self.json {
            return emit_json(
                out,
                &json!({
                    "dataset": m.id,
                    "config": cfg,
                    "rows": data.len(),
                    "scoring": scoring,
                    "fold_scores": cv.fold_scores,
                    "mean": cv.mean,
                    "std": cv.std,
                    "seed": self.seed,
                    "versions": Versions::current(),
                }),
            );
        }
        writeln!(out, "config: {}", cfg.summary())?;
        writeln!(out, "{} rows, {folds}-fold stratified, scoring {scoring}", data.len())?;
        for (i, s) in cv.fold_scores.iter().enumerate() {
            writeln!(out, "fold {:>2}: {s:.4}", i + 1)?;
        }
        writeln!(out, "mean {:.4}  std {:.4}", cv.mean, cv.std)?;
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn grid(
        &self,
        name: &str,
        which: &str,
        grid_path: Option<&Path>,
        folds: usize,
        scoring: Option<ScoringArg>,
        raw_labels: bool,
        out: &mut dyn Write,
        err: &mut dyn Write,
    ) -> Outcome {
        let m = manifest(dataset_id(name)?);
        let base = self.config(&m, which)?;
        let scoring = scoring.map(Scoring::from).unwrap_or(default_scoring(m.id));
        let grid = match grid_path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Failure::Usage(format!("cannot read grid `{}`: {e}", p.display())))?;
                serde_json::from_str::<GridSpec>(&text)
                    .map_err(|e| Failure::Usage(format!("invalid grid `{}`: {e}", p.display())))?
            }
            None => default_grid(&base, scoring),
        };
        let ds = self.load(&m, raw_labels)?;
        let data = if m.id == DatasetId::Disaster {
            ds
        } else {
            self.split_parts(&m, &ds, None)?.0
        };
        writeln!(
            err,
            "searching {} points with {folds}-fold cross-validation",
            grid.size()
        )?;
        let result = grid_search(&data, &base, &grid, &FoldSpec::new(folds, self.seed))?;
        if self.json {
            return emit_json(
                out,
                &json!({
                    "dataset": m.id,
                    "base": base,
                    "grid": grid,
                    "result": result,
                    "seed": self.seed,
                    "versions": Versions::current(),
                }),
            );
        }
        write!(out, "{}", result.render_table())?;
        writeln!(out, "best: {}", result.best_row().config.summary())?;
        Ok(())
    }

    fn predict(
        &self,
        path: &Path,
        input: Option<&Path>,
        dest: Option<&Path>,
        texts: &[String],
        out: &mut dyn Write,
    ) -> Outcome {
        let bundle = load_bundle(path)?;
        let classes = bundle.classes().to_vec();
        let mut rows: Vec<(String, String)> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| ((i + 1).to_string(), t.clone()))
            .collect();
        if let Some(input) = input {
            let m = manifest(dataset_id(&bundle.dataset)?);
            let unlabeled = load_unlabeled_csv(input, &m.schema)?;
            if let Some(dest) = dest {
                write_submission(&bundle.pipeline, &m.schema, &unlabeled, dest)?;
                if !self.json {
                    writeln!(out, "{} predictions -> {}", unlabeled.len(), dest.display())?;
                }
            }
            rows.extend(unlabeled.into_iter().map(|r| (r.id, r.text)));
        }
        if rows.is_empty() {
            return Err(Failure::Usage("nothing to predict; pass texts or --input".into()));
        }
        let preds: Vec<(String, String, Vec<f64>)> = rows
            .iter()
            .map(|(id, text)| {
                let (k, scores) = bundle.pipeline.predict_text(text);
                (
                    id.clone(),
                    classes[k].clone(),
                    class_probabilities(&bundle.pipeline.model, &scores),
                )
            })
            .collect();
        if self.json {
            let items: Vec<Value> = preds
                .iter()
                .map(|(id, label, p)| {
                    let probs: serde_json::Map<String, Value> =
                        classes.iter().cloned().zip(p.iter().map(|x| json!(x))).collect();
                    json!({"id": id, "label": label, "probabilities": probs})
                })
                .collect();
            return emit_json(out, &json!({"dataset": bundle.dataset, "predictions": items}));
        }
        if dest.is_none() {
            for (id, label, p) in &preds {
                let k = classes.iter().position(|c| c == label).unwrap_or(0);
                writeln!(out, "{id}\t{label}\t{:.4}", p[k])?;
            }
        }
        Ok(())
    }

    fn reproduce(
        &self,
        name: &str,
        folds: usize,
        five_class: bool,
        submission: Option<PathBuf>,
        out: &mut dyn Write,
        err: &mut dyn Write,
    ) -> Outcome {
        let id = dataset_id(name)?;
        let mut opts = ReproduceOptions::new(self.seed);
        opts.folds = folds;
        opts.five_class = five_class;
        opts.submission_path = submission;
        let started = std::time::Instant::now();
        let report = reproduce(id, self.data_dir, &opts)?;
        writeln!(
            err,
            "reproduce {id} finished in {:.1}s",
            started.elapsed().as_secs_f64()
        )?;
        if self.json {
            emit_json(out, &report)?;
        } else {
            write!(out, "{}", report.render_text())?;
        }
        if report.all_within_bands() {
            Ok(())
        } else {
            let keys: Vec<&str> = report.failures().iter().map(|c| c.key.as_str()).collect();
            Err(Failure::Band(format!("outside acceptance band: {}", keys.join(", "))))
        }
    }

    fn errors(
        &self,
        name: &str,
        path: &Path,
        n: usize,
        file: Option<&Path>,
        seed: Option<u64>,
        out: &mut dyn Write,
    ) -> Outcome {
        if n == 0 {
            return Err(Failure::Usage("-n must be at least 1".into()));
        }
        let m = manifest(dataset_id(name)?);
        let bundle = load_bundle(path)?;
        let holdout = self.holdout_for(&m, &bundle, file, seed)?;
        let rows = dump_errors(&bundle, &holdout, n)?;
        if self.json {
            return emit_json(out, &json!({"dataset": m.id, "errors": rows}));
        }
        writeln!(out, "{:>10}  {:<18}  {:<18}  text", "confidence", "true", "predicted")?;
        for r in rows {
            let text = r.text.replace(['\n', '\r'], " ");
            writeln!(
                out,
                "{:>10.4}  {:<18}  {:<18}  {text}",
                r.confidence, r.true_label, r.predicted_label
            )?;
        }
        Ok(())
    }

    fn prep(
        &self,
        show_stopwords: bool,
        show_trace: bool,
        preset: &str,
        texts: &[String],
        out: &mut dyn Write,
    ) -> Outcome {
        if show_stopwords {
            if self.json {
                return emit_json(
                    out,
                    &json!({"version": STOPWORDS_VERSION, "stopwords": ENGLISH_STOPWORDS}),
                );
            }
            writeln!(
                out,
                "# stopword list {STOPWORDS_VERSION}, {} entries",
                ENGLISH_STOPWORDS.len()
            )?;
            for w in ENGLISH_STOPWORDS {
                writeln!(out, "{w}")?;
            }
            return Ok(());
        }
        let prep = match preset {
            "raw" => PrepConfig::raw(),
            "full" => PrepConfig::full(),
            other => manifest(dataset_id(other)?).tuned.prep,
        };
        if texts.is_empty() {
            return Err(Failure::Usage("pass at least one text, or --show-stopwords".into()));
        }
        let docs: Vec<Value> = texts
            .iter()
            .map(|t| {
                if show_trace {
                    let stages: Vec<Value> = trace(t, &prep)
                        .into_iter()
                        .map(|(stage, output)| json!({"stage": stage, "output": output}))
                        .collect();
                    json!({"text": t, "trace": stages})
                } else {
                    let tokens: Vec<String> = preprocess(t, &prep).into_iter().map(|k| k.into_string()).collect();
                    json!({"text": t, "tokens": tokens})
                }
            })
            .collect();
        if self.json {
            return emit_json(out, &json!({"prep": prep, "documents": docs}));
        }
        for (t, d) in texts.iter().zip(&docs) {
            if show_trace {
                for (stage, output) in trace(t, &prep) {
                    writeln!(out, "{stage:<17} {output}")?;
                }
                writeln!(out)?;
            } else {
                let tokens: Vec<&str> = d["tokens"]
                    .as_array()
                    .into_iter()
                    .flatten()
                    .filter_map(Value::as_str)
                    .collect();
                writeln!(out, "{}", tokens.join(" "))?;
            }
        }
        Ok(())
    }
}

fn default_scoring(id: DatasetId) -> Scoring {
    match id {
        DatasetId::Disaster => Scoring::Accuracy,
        _ => Scoring::WeightedF1,
    }
}

/// Regularization from 0.1 to 2, both penalties, class weighting, threshold,
/// stopwords, and bigrams.
fn default_grid(base: &PipelineConfig, scoring: Scoring) -> GridSpec {
    let mut g = GridSpec::from_base(base, scoring);
    if matches!(base.model, ModelSpec::LogReg(_)) {
        g.penalty = vec![Penalty::L2, Penalty::L1];
        g.c = vec![0.1, 0.31, 0.5, 1.0, 2.0];
        g.class_weights = vec![ClassWeights::None, ClassWeights::Balanced];
    }
    g.min_count = vec![1, 3, 5];
    g.ngram_range = vec![NgramRange::UNIGRAMS, NgramRange::UNI_BI];
    g.remove_stopwords = vec![false, true];
    g
}
