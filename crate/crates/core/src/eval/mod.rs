//! Classification metrics, k-fold cross-validation, and grid search.

mod cv;
mod grid;
mod metrics;

pub use cv::{kfold_cv, kfold_cv_tokens, make_folds, CvResult, FoldSpec, Scoring};
pub use grid::{grid_search, GridPoint, GridResult, GridRow, GridSpec};
pub use metrics::{
    compute_report, compute_report_indices, report_from_confusion, ClassMetrics, ConfusionMatrix, EvalReport,
    MetricName,
};
