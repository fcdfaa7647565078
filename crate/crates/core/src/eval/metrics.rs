use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recording::EmotionLabel;

const K: usize = EmotionLabel::COUNT;

/// Rows are true classes, columns predicted classes, both in label order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; K]; K],
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; K]; K]) -> Self {
        ConfusionMatrix { counts }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (EmotionLabel, EmotionLabel)>) -> Self {
        let mut cm = ConfusionMatrix::default();
        for (truth, pred) in pairs {
            cm.record(truth, pred);
        }
        cm
    }

    pub fn record(&mut self, truth: EmotionLabel, predicted: EmotionLabel) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..K).map(|k| self.counts[k][k]).sum()
    }

    pub fn row_sum(&self, k: usize) -> u64 {
        self.counts[k].iter().sum()
    }

    pub fn col_sum(&self, k: usize) -> u64 {
        self.counts.iter().map(|r| r[k]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.trace() as f64 / n as f64,
        }
    }
}

/// Cohen's kappa. When chance agreement is total (`p_e = 1`) the result is 1
/// for perfect agreement and 0 otherwise.
pub fn kappa(cm: &ConfusionMatrix) -> Result<f64> {
    let n = u128::from(cm.total());
    if n == 0 {
        return Err(Error::InvalidParameter(
            "kappa of an empty confusion matrix".into(),
        ));
    }
    // kappa = (N*trace - sum(row*col)) / (N^2 - sum(row*col)), all integers
    let chance: u128 = (0..K)
        .map(|k| u128::from(cm.row_sum(k)) * u128::from(cm.col_sum(k)))
        .sum();
    let observed = n * u128::from(cm.trace());
    let denom = n * n - chance;
    if denom == 0 {
        return Ok(if observed == n * n { 1.0 } else { 0.0 });
    }
    Ok((observed as f64 - chance as f64) / denom as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub mae: f64,
    pub rmse: f64,
    /// Percentages relative to the prior-probability baseline.
    pub rae: f64,
    pub rrse: f64,
}

fn check_distribution(d: &[f64; K], what: &str) -> Result<()> {
    let sum: f64 = d.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || d.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidParameter(format!(
            "{what} is not a probability distribution (sum {sum})"
        )));
    }
    Ok(())
}

fn relative(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Absolute and squared errors of predicted class distributions against
/// one-hot truths, plus their ratios to a constant `baseline` predictor.
pub fn error_metrics(
    dists: &[[f64; K]],
    truths: &[EmotionLabel],
    baseline: &[f64; K],
) -> Result<ErrorMetrics> {
    if dists.len() != truths.len() {
        return Err(Error::LengthMismatch {
            left: dists.len(),
            right: truths.len(),
        });
    }
    if dists.is_empty() {
        return Err(Error::InvalidParameter("no predictions to score".into()));
    }
    check_distribution(baseline, "baseline")?;
    let (mut abs, mut sq, mut base_abs, mut base_sq) = (0.0, 0.0, 0.0, 0.0);
    for (d, t) in dists.iter().zip(truths) {
        check_distribution(d, "prediction")?;
        let y = t.one_hot();
        for k in 0..K {
            let e = d[k] - y[k];
            let b = baseline[k] - y[k];
            abs += e.abs();
            sq += e * e;
            base_abs += b.abs();
            base_sq += b * b;
        }
    }
    let cells = (dists.len() * K) as f64;
    Ok(ErrorMetrics {
        mae: abs / cells,
        rmse: (sq / cells).sqrt(),
        rae: 100.0 * relative(abs, base_abs),
        rrse: 100.0 * relative(sq, base_sq).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: EmotionLabel,
    pub support: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Per-class precision, recall and F-measure, plus support-weighted averages.
pub fn precision_recall_f(cm: &ConfusionMatrix) -> ([ClassMetrics; K], WeightedMetrics) {
    let per: [ClassMetrics; K] = std::array::from_fn(|k| {
        let precision = ratio(cm.counts[k][k], cm.col_sum(k));
        let recall = ratio(cm.counts[k][k], cm.row_sum(k));
        ClassMetrics {
            label: EmotionLabel::ALL[k],
            support: cm.row_sum(k),
            precision,
            recall,
            f_measure: harmonic(precision, recall),
        }
    });
    let n = cm.total();
    let weigh = |f: fn(&ClassMetrics) -> f64| {
        if n == 0 {
            return 0.0;
        }
        per.iter().map(|m| m.support as f64 * f(m)).sum::<f64>() / n as f64
    };
    let weighted = WeightedMetrics {
        precision: weigh(|m| m.precision),
        // support weighting cancels the recall denominator
        recall: cm.accuracy(),
        f_measure: weigh(|m| m.f_measure),
    };
    (per, weighted)
}

/// `value` rounded half-up to `decimals` places.
pub fn round_half_up(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (value * scale + 0.5).floor() / scale
}

/// `correct / n` as a percentage with two decimals, rounded half-up in exact
/// integer arithmetic (32/42 gives "76.19", 30/42 gives "71.43").
pub fn format_percent(correct: u64, n: u64) -> String {
    if n == 0 {
        return "0.00".into();
    }
    let hundredths = (u128::from(correct) * 20_000 + u128::from(n)) / (2 * u128::from(n));
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}
