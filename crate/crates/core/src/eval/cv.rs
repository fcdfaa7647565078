use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{error_metrics, format_percent, kappa, precision_recall_f, ConfusionMatrix};
use super::report::{CvEcho, EvalReport, InstancePrediction};
use crate::dataset::{resample_balance, stratified_folds, Dataset, Warning, WarningKind};
use crate::error::{Error, Result};
use crate::features::FeatureFamily;
use crate::rng::derive_seed;
use crate::svm::{train_multiclass, Prediction, SvmConfig};

/// Where class balancing happens relative to fold construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvMode {
    /// Resample the whole dataset once, then fold it. Duplicated instances
    /// can land on both sides of a split.
    #[default]
    PaperFaithful,
    /// Fold the original dataset and resample each training split only.
    LeakageSafe,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvSettings {
    pub folds: usize,
    pub seed: u64,
    pub mode: CvMode,
}

impl Default for CvSettings {
    fn default() -> Self {
        CvSettings {
            folds: 10,
            seed: 42,
            mode: CvMode::PaperFaithful,
        }
    }
}

const RESAMPLE_STREAM: u64 = 0x5eed_0001;
const FOLD_STREAM: u64 = 0x5eed_0002;
const TRAIN_STREAM: u64 = 0x5eed_1000;

struct FoldOutput {
    predictions: Vec<(usize, Prediction)>,
}

/// Stratified k-fold cross-validation with pooled held-out predictions.
pub fn cross_validate(
    ds: &Dataset,
    family: FeatureFamily,
    svm: &SvmConfig,
    cv: &CvSettings,
) -> Result<EvalReport> {
    if cv.folds < 2 {
        return Err(Error::InvalidParameter(format!(
            "k = {} must be >= 2",
            cv.folds
        )));
    }
    let evaluated = match cv.mode {
        CvMode::PaperFaithful => resample_balance(ds, derive_seed(cv.seed, RESAMPLE_STREAM))?,
        CvMode::LeakageSafe => ds.clone(),
    };
    let folds = stratified_folds(&evaluated, cv.folds, derive_seed(cv.seed, FOLD_STREAM))?;

    let mut in_fold = vec![0usize; evaluated.len()];
    for (f, idx) in folds.iter().enumerate() {
        for &i in idx {
            in_fold[i] = f;
        }
    }

    let outputs = folds
        .par_iter()
        .enumerate()
        .map(|(f, test)| -> Result<FoldOutput> {
            let train_idx: Vec<usize> = (0..evaluated.len()).filter(|&i| in_fold[i] != f).collect();
            let mut train = evaluated.subset(&train_idx);
            if let Some(label) = train.first_missing_class() {
                return Err(Error::FoldMissingClass { fold: f, label });
            }
            let stream = derive_seed(cv.seed, TRAIN_STREAM + f as u64);
            if cv.mode == CvMode::LeakageSafe {
                train = resample_balance(&train, stream)?;
            }
            let model = train_multiclass(&train, family, svm, stream)?;
            let predictions = test
                .iter()
                .map(|&i| {
                    let x = evaluated.instances()[i].features.select(family);
                    Ok((i, model.predict(x)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FoldOutput { predictions })
        })
        .collect::<Result<Vec<_>>>()?;

    // sequential reduction in fold order
    let mut cm = ConfusionMatrix::default();
    let mut dists = Vec::with_capacity(evaluated.len());
    let mut truths = Vec::with_capacity(evaluated.len());
    let mut predictions = Vec::with_capacity(evaluated.len());
    for (f, out) in outputs.iter().enumerate() {
        for (i, p) in &out.predictions {
            let inst = &evaluated.instances()[*i];
            cm.record(inst.label, p.label);
            dists.push(p.distribution);
            truths.push(inst.label);
            predictions.push(InstancePrediction {
                recording_id: inst.recording_id.clone(),
                fold: f,
                truth: inst.label,
                predicted: p.label,
                votes: p.votes,
            });
        }
    }

    let baseline = evaluated.priors();
    let errors = error_metrics(&dists, &truths, &baseline)?;
    let (per_class, weighted) = precision_recall_f(&cm);
    let mode_note = match cv.mode {
        CvMode::PaperFaithful => {
            "paper_faithful: whole dataset resampled before folding; duplicates may straddle folds"
        }
        CvMode::LeakageSafe => "leakage_safe: only training splits resampled; test folds untouched",
    };

    Ok(EvalReport {
        feature_set: family,
        feature_len: family.len(),
        instances: evaluated.len(),
        confusion: cm,
        accuracy: cm.accuracy(),
        accuracy_percent: format_percent(cm.trace(), cm.total()),
        kappa: kappa(&cm)?,
        mae: errors.mae,
        rmse: errors.rmse,
        rae: errors.rae,
        rrse: errors.rrse,
        per_class: per_class.to_vec(),
        weighted,
        baseline,
        class_counts: evaluated.class_counts(),
        config_echo: CvEcho {
            feature_set: family,
            folds: cv.folds,
            seed: cv.seed,
            mode: cv.mode,
            svm: *svm,
        },
        warnings: vec![Warning {
            kind: WarningKind::ResampleMode,
            recording_id: None,
            message: mode_note.into(),
        }],
        predictions,
    })
}
