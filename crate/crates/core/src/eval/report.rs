use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::cv::CvMode;
use super::metrics::{round_half_up, ClassMetrics, ConfusionMatrix, WeightedMetrics};
use crate::dataset::Warning;
use crate::features::FeatureFamily;
use crate::recording::EmotionLabel;
use crate::svm::SvmConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvEcho {
    pub feature_set: FeatureFamily,
    pub folds: usize,
    pub seed: u64,
    pub mode: CvMode,
    pub svm: SvmConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstancePrediction {
    pub recording_id: String,
    pub fold: usize,
    pub truth: EmotionLabel,
    pub predicted: EmotionLabel,
    pub votes: [u8; 4],
}

/// Pooled cross-validation results for one feature set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub feature_set: FeatureFamily,
    pub feature_len: usize,
    pub instances: usize,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    /// Accuracy in percent, two decimals, rounded half-up.
    pub accuracy_percent: String,
    pub kappa: f64,
    pub mae: f64,
    pub rmse: f64,
    pub rae: f64,
    pub rrse: f64,
    pub per_class: Vec<ClassMetrics>,
    pub weighted: WeightedMetrics,
    pub baseline: [f64; 4],
    pub class_counts: [usize; 4],
    pub config_echo: CvEcho,
    pub warnings: Vec<Warning>,
    pub predictions: Vec<InstancePrediction>,
}

/// Aligned plain-text table, one row per report:
/// `Feature set | Accuracy(%) | MAE | RMSE | RAE | RRSE | Kappa`.
pub fn render_table(reports: &[EvalReport]) -> String {
    let header = [
        "Feature set",
        "Accuracy(%)",
        "MAE",
        "RMSE",
        "RAE",
        "RRSE",
        "Kappa",
    ];
    let rows: Vec<[String; 7]> = reports
        .iter()
        .map(|r| {
            [
                r.feature_set.title().to_string(),
                r.accuracy_percent.clone(),
                format!("{:.3}", round_half_up(r.mae, 3)),
                format!("{:.3}", round_half_up(r.rmse, 3)),
                format!("{:.2}", round_half_up(r.rae, 2)),
                format!("{:.2}", round_half_up(r.rrse, 2)),
                format!("{:.3}", round_half_up(r.kappa, 3)),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }

    let mut out = String::new();
    let line = |out: &mut String, cells: &[&str]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", parts.join(" | ").trim_end());
    };
    line(&mut out, &header);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    let _ = writeln!(out, "{}", rule.join("-+-"));
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&mut out, &cells);
    }
    out
}

/// Per-class precision/recall/F-measure block for one report.
pub fn render_class_metrics(report: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>9} {:>9} {:>9} {:>8}",
        "Class", "Precision", "Recall", "F-measure", "Support"
    );
    for m in &report.per_class {
        let _ = writeln!(
            out,
            "{:<10} {:>9.3} {:>9.3} {:>9.3} {:>8}",
            m.label.to_string(),
            round_half_up(m.precision, 3),
            round_half_up(m.recall, 3),
            round_half_up(m.f_measure, 3),
            m.support
        );
    }
    let w = &report.weighted;
    let _ = writeln!(
        out,
        "{:<10} {:>9.3} {:>9.3} {:>9.3} {:>8}",
        "Weighted",
        round_half_up(w.precision, 3),
        round_half_up(w.recall, 3),
        round_half_up(w.f_measure, 3),
        report.instances
    );
    out
}
