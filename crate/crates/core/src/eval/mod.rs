//! Cross-validation and the classification metric suite.

mod cv;
mod metrics;
mod report;

pub use cv::{cross_validate, CvMode, CvSettings};
pub use metrics::{
    error_metrics, format_percent, kappa, precision_recall_f, round_half_up, ClassMetrics,
    ConfusionMatrix, ErrorMetrics, WeightedMetrics,
};
pub use report::{render_class_metrics, render_table, CvEcho, EvalReport, InstancePrediction};
