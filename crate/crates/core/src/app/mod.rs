//! Dataset manifests, model bundles, and canned experiment runs.

pub mod bundle;
pub mod experiments;
pub mod manifest;

pub use bundle::{
    bundle_from_str, bundle_to_string, fit_pipeline, load_bundle, save_bundle, ModelBundle, TrainingMetadata,
    BUNDLE_FORMAT_VERSION,
};
pub use experiments::{
    class_probabilities, dump_errors, evaluate_pipeline, holdout_references, load_dataset, reproduce, run_two_stage,
    write_submission, Comparison, CvSummary, EvalDocument, ExperimentRecord, MisclassifiedRow, ReportedConstant,
    ReproduceOptions, ReproductionReport, TwoStageResult, Versions, NEWS_LABEL, NON_NEWS_LABEL, PUBLISHED_LABEL,
};
pub use manifest::{
    baseline_config, manifest, manifest_by_name, Band, DatasetId, DatasetManifest, PublishedConstant, ReferenceScore,
};
