//! Quadrant labeling from SAM ratings, class balancing and stratified folds.

use eeg_emotion::dataset::{
    label_from_sam, resample_balance, stratified_folds, Dataset, LabeledInstance, MidpointPolicy,
};
use eeg_emotion::features::FEATURE_LEN;
use eeg_emotion::{EmotionLabel, FeatureVector, SamRating};

pub fn run_example() -> eeg_emotion::Result<String> {
    let mut out = String::new();
    for (v, a) in [(7, 8), (8, 2), (3, 3), (2, 9), (5, 7)] {
        let rating = SamRating::new(v, a)?;
        let strict = label_from_sam(rating, MidpointPolicy::Reject);
        let lenient = label_from_sam(rating, MidpointPolicy::AssignPositive);
        out.push_str(&format!(
            "valence {v} arousal {a}: {strict:?} / {lenient:?}\n"
        ));
    }

    // an imbalanced 42-instance dataset: 15 Happy, 12 Relaxed, 9 Sad, 6 Angry
    let mut instances = Vec::new();
    for (label, count) in EmotionLabel::ALL.into_iter().zip([15, 12, 9, 6]) {
        for i in 0..count {
            let mut values = [0.0; FEATURE_LEN];
            values[..10].fill(1.0 + i as f64);
            instances.push(LabeledInstance {
                recording_id: format!("{label}_{i}"),
                features: FeatureVector::from_array(values)?,
                label,
            });
        }
    }
    let ds = Dataset::new(instances);
    let balanced = resample_balance(&ds, 42)?;
    out.push_str(&format!(
        "counts {:?} -> {:?}\n",
        ds.class_counts(),
        balanced.class_counts()
    ));
    let folds = stratified_folds(&balanced, 10, 42)?;
    let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
    out.push_str(&format!("fold sizes {sizes:?}\n"));
    Ok(out)
}

fn main() -> eeg_emotion::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
