use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{source_name}: missing required column `{column}`")]
    MissingColumn { source_name: String, column: String },

    #[error("{source_name}: unbalanced quote, field opened on line {line} never closes")]
    UnbalancedQuote { source_name: String, line: usize },

    #[error("{source_name}: no valid rows")]
    NoValidRows { source_name: String },

    #[error("invalid label schema `{schema}`: {reason}")]
    InvalidSchema { schema: String, reason: String },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("label `{0}` is present in the data but not covered by the mapping")]
    UnmappedLabel(String),

    #[error("class `{label}` has {count} documents; at least {required} are needed")]
    ClassTooSmall {
        label: String,
        count: usize,
        required: usize,
    },

    #[error("holdout fraction {0} must lie strictly between 0 and 1")]
    FractionOutOfRange(f64),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("vocabulary is empty after applying min_count {0}")]
    EmptyVocabulary(u64),

    #[error("invalid n-gram range ({lo}, {hi}); need 1 <= lo <= hi <= 3")]
    InvalidNgramRange { lo: usize, hi: usize },

    #[error("smoothing alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),

    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),

    #[error("training labels contain only class `{0}`")]
    SingleClass(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("length mismatch: {truth} true labels but {predicted} predictions")]
    LengthMismatch { truth: usize, predicted: usize },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("invalid fold settings: {0}")]
    InvalidFolds(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unsupported bundle format version {found} (this build reads version {expected})")]
    VersionMismatch { found: u64, expected: u64 },

    #[error("corrupted bundle: {0}")]
    CorruptedBundle(String),

    #[error("unknown dataset `{name}`; valid names are: {valid}")]
    UnknownDataset { name: String, valid: String },

    #[error("missing data file for `{dataset}`: expected one of [{expected}] under {} (public source: {source_url})", dir.display())]
    MissingDataFile {
        dataset: String,
        expected: String,
        dir: PathBuf,
        source_url: String,
    },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
