//! Quadrant labeling of SAM ratings, class balancing and stratified folds.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::recording::{EmotionLabel, SamRating};
use crate::rng::seeded;

/// How a rating of exactly 5 on either axis is treated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MidpointPolicy {
    #[default]
    Reject,
    AssignPositive,
    AssignNegative,
}

/// Maps a rating onto its valence/arousal quadrant. `None` means the rating
/// sits on the midpoint and the policy rejects it.
pub fn label_from_sam(rating: SamRating, policy: MidpointPolicy) -> Option<EmotionLabel> {
    let sign = |v: u8| -> Option<bool> {
        use std::cmp::Ordering::*;
        match v.cmp(&SamRating::MIDPOINT) {
            Greater => Some(true),
            Less => Some(false),
            Equal => match policy {
                MidpointPolicy::Reject => None,
                MidpointPolicy::AssignPositive => Some(true),
                MidpointPolicy::AssignNegative => Some(false),
            },
        }
    };
    let label = match (sign(rating.valence())?, sign(rating.arousal())?) {
        (true, true) => EmotionLabel::Happy,
        (true, false) => EmotionLabel::Relaxed,
        (false, false) => EmotionLabel::Sad,
        (false, true) => EmotionLabel::Angry,
    };
    Some(label)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    MidpointExcluded,
    ResampleMode,
}

/// A structured note carried into run reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub kind: WarningKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recording_id: Option<String>,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.recording_id {
            Some(id) => write!(f, "{id}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledInstance {
    pub recording_id: String,
    pub features: FeatureVector,
    pub label: EmotionLabel,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    instances: Vec<LabeledInstance>,
    class_counts: [usize; 4],
}

impl Dataset {
    pub fn new(instances: Vec<LabeledInstance>) -> Self {
        let mut class_counts = [0; 4];
        for inst in &instances {
            class_counts[inst.label.index()] += 1;
        }
        Dataset {
            instances,
            class_counts,
        }
    }

    /// Labels rated recordings, dropping (and reporting) midpoint ratings
    /// the policy rejects.
    pub fn from_rated(
        rated: impl IntoIterator<Item = (String, FeatureVector, SamRating)>,
        policy: MidpointPolicy,
    ) -> (Dataset, Vec<Warning>) {
        let mut instances = Vec::new();
        let mut warnings = Vec::new();
        for (recording_id, features, rating) in rated {
            match label_from_sam(rating, policy) {
                Some(label) => instances.push(LabeledInstance {
                    recording_id,
                    features,
                    label,
                }),
                None => warnings.push(Warning {
                    kind: WarningKind::MidpointExcluded,
                    message: format!(
                        "excluded: midpoint rating (valence {}, arousal {})",
                        rating.valence(),
                        rating.arousal()
                    ),
                    recording_id: Some(recording_id),
                }),
            }
        }
        (Dataset::new(instances), warnings)
    }

    pub fn instances(&self) -> &[LabeledInstance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn class_counts(&self) -> [usize; 4] {
        self.class_counts
    }

    pub fn labels(&self) -> Vec<EmotionLabel> {
        self.instances.iter().map(|i| i.label).collect()
    }

    /// Class frequencies, in label order.
    pub fn priors(&self) -> [f64; 4] {
        let n = self.len().max(1) as f64;
        self.class_counts.map(|c| c as f64 / n)
    }

    pub fn first_missing_class(&self) -> Option<EmotionLabel> {
        EmotionLabel::ALL
            .into_iter()
            .find(|l| self.class_counts[l.index()] == 0)
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset::new(indices.iter().map(|&i| self.instances[i].clone()).collect())
    }
}

/// Per-class target counts for `n` instances: `n / 4` each, with the
/// remainder going to the earliest classes in label order.
pub fn balanced_counts(n: usize) -> [usize; 4] {
    let base = n / 4;
    let rem = n % 4;
    std::array::from_fn(|k| base + usize::from(k < rem))
}

/// Draws, with replacement, a dataset of the same size whose class counts are
/// as uniform as integer rounding allows. Output is grouped by class in label
/// order.
pub fn resample_balance(ds: &Dataset, seed: u64) -> Result<Dataset> {
    if let Some(label) = ds.first_missing_class() {
        return Err(Error::EmptyClass(label));
    }
    let n = ds.len();
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "resampling needs at least 4 instances, got {n}"
        )));
    }
    let mut by_class: [Vec<usize>; 4] = Default::default();
    for (i, inst) in ds.instances().iter().enumerate() {
        by_class[inst.label.index()].push(i);
    }
    let mut rng = seeded(seed);
    let mut out = Vec::with_capacity(n);
    for (members, target) in by_class.iter().zip(balanced_counts(n)) {
        for _ in 0..target {
            let pick = members[rng.random_range(0..members.len())];
            out.push(ds.instances()[pick].clone());
        }
    }
    Ok(Dataset::new(out))
}

pub fn stratified_folds(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    stratified_folds_for_labels(&ds.labels(), k, seed)
}

/// Splits indices `0..labels.len()` into `k` folds. Each class is shuffled
/// and dealt round-robin, continuing the dealer position across classes, so
/// both overall fold sizes and per-class fold counts differ by at most one.
/// Each fold is returned in ascending index order.
pub fn stratified_folds_for_labels(
    labels: &[EmotionLabel],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "k = {k}; need at least 2 folds"
        )));
    }
    if k > labels.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the {} available instances",
            labels.len()
        )));
    }
    let mut rng = seeded(seed);
    let mut folds = vec![Vec::new(); k];
    let mut dealer = 0;
    for class in EmotionLabel::ALL {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for idx in members {
            folds[dealer % k].push(idx);
            dealer += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FEATURE_LEN;
    use proptest::prelude::*;

    fn fv(tag: f64) -> FeatureVector {
        let mut v = [0.0; FEATURE_LEN];
        v[..10].fill(1.0);
        v[10] = tag;
        FeatureVector::from_array(v).unwrap()
    }

    fn dataset(counts: [usize; 4]) -> Dataset {
        let mut inst = Vec::new();
        for (k, &c) in counts.iter().enumerate() {
            for j in 0..c {
                inst.push(LabeledInstance {
                    recording_id: format!("{k}-{j}"),
                    features: fv((k * 100 + j) as f64),
                    label: EmotionLabel::from_index(k).unwrap(),
                });
            }
        }
        Dataset::new(inst)
    }

    fn sam(v: i64, a: i64) -> SamRating {
        SamRating::new(v, a).unwrap()
    }

    #[test]
    fn quadrant_examples() {
        let p = MidpointPolicy::Reject;
        assert_eq!(label_from_sam(sam(7, 7), p), Some(EmotionLabel::Happy));
        assert_eq!(label_from_sam(sam(3, 3), p), Some(EmotionLabel::Sad));
        assert_eq!(label_from_sam(sam(3, 7), p), Some(EmotionLabel::Angry));
        assert_eq!(label_from_sam(sam(7, 3), p), Some(EmotionLabel::Relaxed));
        assert_eq!(label_from_sam(sam(5, 7), p), None);
    }

    #[test]
    fn midpoint_policies() {
        assert_eq!(
            label_from_sam(sam(5, 7), MidpointPolicy::AssignPositive),
            Some(EmotionLabel::Happy)
        );
        assert_eq!(
            label_from_sam(sam(5, 7), MidpointPolicy::AssignNegative),
            Some(EmotionLabel::Angry)
        );
        assert_eq!(
            label_from_sam(sam(5, 5), MidpointPolicy::AssignNegative),
            Some(EmotionLabel::Sad)
        );
    }

    #[test]
    fn midpoint_exclusion_warns() {
        let rated = vec![
            ("a".to_string(), fv(0.0), sam(7, 7)),
            ("b".to_string(), fv(1.0), sam(5, 2)),
        ];
        let (ds, warnings) = Dataset::from_rated(rated, MidpointPolicy::Reject);
        assert_eq!(ds.len(), 1);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].kind, WarningKind::MidpointExcluded);
        assert_eq!(warnings[0].recording_id.as_deref(), Some("b"));
    }

    #[test]
    fn grid_totality() {
        let mut counts = [0; 4];
        for v in 1..=9 {
            for a in 1..=9 {
                if v == 5 || a == 5 {
                    continue;
                }
                let l = label_from_sam(sam(v, a), MidpointPolicy::Reject).unwrap();
                counts[l.index()] += 1;
            }
        }
        assert_eq!(counts, [16; 4]);
    }

    #[test]
    fn balanced_counts_rule() {
        assert_eq!(balanced_counts(21), [6, 5, 5, 5]);
        assert_eq!(balanced_counts(24), [6; 4]);
        assert_eq!(balanced_counts(42), [11, 11, 10, 10]);
    }

    #[test]
    fn resample_examples() {
        let out = resample_balance(&dataset([6, 6, 6, 6]), 1).unwrap();
        assert_eq!(out.class_counts(), [6; 4]);
        let out = resample_balance(&dataset([10, 5, 5, 1]), 1).unwrap();
        assert_eq!(out.class_counts(), [6, 5, 5, 5]);
        // the lone Angry instance is repeated
        assert!(out
            .instances()
            .iter()
            .filter(|i| i.label == EmotionLabel::Angry)
            .all(|i| i.recording_id == "3-0"));
    }

    #[test]
    fn resample_empty_class() {
        let err = resample_balance(&dataset([3, 0, 2, 1]), 1).unwrap_err();
        assert!(matches!(err, Error::EmptyClass(EmotionLabel::Relaxed)));
        assert!(err.to_string().contains("Relaxed"));
    }

    #[test]
    fn resample_is_deterministic() {
        let ds = dataset([9, 3, 4, 2]);
        assert_eq!(
            resample_balance(&ds, 5).unwrap(),
            resample_balance(&ds, 5).unwrap()
        );
        assert_ne!(
            resample_balance(&ds, 5).unwrap(),
            resample_balance(&ds, 6).unwrap()
        );
    }

    #[test]
    fn fold_examples() {
        let folds = stratified_folds(&dataset([5; 4]), 10, 3).unwrap();
        assert!(folds.iter().all(|f| f.len() == 2));

        let folds = stratified_folds(&dataset([11, 11, 10, 10]), 10, 3).unwrap();
        let mut sizes: Vec<_> = folds.iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, [4, 4, 4, 4, 4, 4, 4, 4, 5, 5]);

        assert!(stratified_folds(&dataset([1, 1, 1, 0]), 4, 0).is_err());
        assert!(stratified_folds(&dataset([1, 1, 1, 1]), 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn folds_partition_and_stratify(
            counts in prop::array::uniform4(0usize..15),
            k in 2usize..12,
            seed in any::<u64>(),
        ) {
            let ds = dataset(counts);
            prop_assume!(ds.len() >= k);
            let folds = stratified_folds(&ds, k, seed).unwrap();
            prop_assert_eq!(folds.len(), k);
            let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..ds.len()).collect::<Vec<_>>());
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            for class in EmotionLabel::ALL {
                let per: Vec<usize> = folds
                    .iter()
                    .map(|f| f.iter().filter(|&&i| ds.instances()[i].label == class).count())
                    .collect();
                prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
            }
        }

        #[test]
        fn resample_counts_ignore_seed(
            counts in prop::array::uniform4(1usize..20),
            seed in any::<u64>(),
        ) {
            let ds = dataset(counts);
            let out = resample_balance(&ds, seed).unwrap();
            prop_assert_eq!(out.len(), ds.len());
            prop_assert_eq!(out.class_counts(), balanced_counts(ds.len()));
        }
    }
}
