//! Confusion-matrix metrics on a small hand-built example.

use eeg_emotion::eval::{
    error_metrics, format_percent, kappa, precision_recall_f, ConfusionMatrix,
};
use eeg_emotion::EmotionLabel::{self, *};

pub fn run_example() -> eeg_emotion::Result<String> {
    let pairs = [
        (Happy, Happy),
        (Happy, Happy),
        (Happy, Relaxed),
        (Relaxed, Relaxed),
        (Relaxed, Relaxed),
        (Relaxed, Sad),
        (Sad, Sad),
        (Sad, Sad),
        (Sad, Sad),
        (Angry, Angry),
        (Angry, Angry),
        (Angry, Happy),
    ];
    let cm = ConfusionMatrix::from_pairs(pairs);
    let mut out = format!(
        "accuracy {}%  kappa {:.3}\n",
        format_percent(cm.trace(), cm.total()),
        kappa(&cm)?
    );
    let (per_class, weighted) = precision_recall_f(&cm);
    for m in per_class {
        out.push_str(&format!(
            "{:<8} precision {:.3} recall {:.3} f {:.3}\n",
            m.label.to_string(),
            m.precision,
            m.recall,
            m.f_measure
        ));
    }
    out.push_str(&format!("weighted recall {:.3}\n", weighted.recall));

    // hard one-hot predictions against a uniform prior baseline
    let truths: Vec<EmotionLabel> = pairs.iter().map(|p| p.0).collect();
    let dists: Vec<[f64; 4]> = pairs.iter().map(|p| p.1.one_hot()).collect();
    let e = error_metrics(&dists, &truths, &[0.25; 4])?;
    out.push_str(&format!(
        "MAE {:.3} RMSE {:.3} RAE {:.2}% RRSE {:.2}%\n",
        e.mae, e.rmse, e.rae, e.rrse
    ));
    Ok(out)
}

fn main() -> eeg_emotion::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
