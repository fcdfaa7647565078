use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::KernelParams;
use super::normalize::NormalizationParams;
use super::smo::{train_binary_smo, BinaryModel, SmoSettings, DEFAULT_MAX_PASSES};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::features::FeatureFamily;
use crate::recording::EmotionLabel;
use crate::rng::derive_seed;

/// Hyperparameters of the four-class machine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmConfig {
    /// Soft-margin penalty C.
    pub penalty: f64,
    pub degree: u32,
    /// Additive kernel constant.
    pub coef0: f64,
    pub tol: f64,
    pub max_passes: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            penalty: 1.0,
            degree: 3,
            coef0: 1.0,
            tol: 1e-3,
            max_passes: DEFAULT_MAX_PASSES,
        }
    }
}

impl SvmConfig {
    pub fn kernel(&self) -> Result<KernelParams> {
        KernelParams::new(self.coef0, self.degree)
    }

    fn smo(&self, seed: u64) -> SmoSettings {
        SmoSettings {
            penalty: self.penalty,
            tol: self.tol,
            max_passes: self.max_passes,
            seed,
        }
    }
}

/// The binary machine for one unordered class pair; positive decision values
/// vote for `first`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairModel {
    pub first: EmotionLabel,
    pub second: EmotionLabel,
    pub model: BinaryModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub classes: [EmotionLabel; 4],
    pub norm: NormalizationParams,
    pub pairwise: Vec<PairModel>,
}

/// Class pairs in training order: (0,1), (0,2), (0,3), (1,2), (1,3), (2,3).
pub fn class_pairs() -> Vec<(EmotionLabel, EmotionLabel)> {
    let mut out = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            out.push((EmotionLabel::ALL[i], EmotionLabel::ALL[j]));
        }
    }
    out
}

/// One-vs-one training on raw (unnormalized) rows.
pub fn train_multiclass_rows(
    rows: &[Vec<f64>],
    labels: &[EmotionLabel],
    cfg: &SvmConfig,
    seed: u64,
) -> Result<SvmModel> {
    if rows.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: rows.len(),
            right: labels.len(),
        });
    }
    if let Some(missing) = EmotionLabel::ALL.into_iter().find(|l| !labels.contains(l)) {
        return Err(Error::EmptyClass(missing));
    }
    let kernel = cfg.kernel()?;
    let norm = NormalizationParams::fit(rows)?;
    let normalized: Vec<Vec<f64>> = rows.iter().map(|r| norm.apply(r)).collect();

    let pairwise = class_pairs()
        .into_par_iter()
        .enumerate()
        .map(|(p, (first, second))| {
            let (x, y): (Vec<Vec<f64>>, Vec<f64>) = normalized
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == first || l == second)
                .map(|(r, &l)| (r.clone(), if l == first { 1.0 } else { -1.0 }))
                .unzip();
            let model = train_binary_smo(&x, &y, &kernel, &cfg.smo(derive_seed(seed, p as u64)))?;
            Ok(PairModel {
                first,
                second,
                model,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SvmModel {
        classes: EmotionLabel::ALL,
        norm,
        pairwise,
    })
}

pub fn train_multiclass(
    ds: &Dataset,
    family: FeatureFamily,
    cfg: &SvmConfig,
    seed: u64,
) -> Result<SvmModel> {
    let rows: Vec<Vec<f64>> = ds
        .instances()
        .iter()
        .map(|i| i.features.select(family).to_vec())
        .collect();
    train_multiclass_rows(&rows, &ds.labels(), cfg, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: EmotionLabel,
    pub votes: [u8; 4],
    /// Votes divided by the number of pairwise machines.
    pub distribution: [f64; 4],
}

impl Prediction {
    /// Majority vote; ties go to the lowest class index.
    pub fn from_votes(votes: [u8; 4]) -> Prediction {
        let total: u32 = votes.iter().map(|&v| u32::from(v)).sum();
        let mut best = 0;
        for k in 1..4 {
            if votes[k] > votes[best] {
                best = k;
            }
        }
        let distribution = votes.map(|v| {
            if total == 0 {
                0.25
            } else {
                f64::from(v) / f64::from(total)
            }
        });
        Prediction {
            label: EmotionLabel::ALL[best],
            votes,
            distribution,
        }
    }
}

impl SvmModel {
    pub fn dim(&self) -> usize {
        self.norm.dim()
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch {
                left: self.dim(),
                right: x.len(),
            });
        }
        let z = self.norm.apply(x);
        let mut votes = [0u8; 4];
        for pm in &self.pairwise {
            let winner = if pm.model.decision(&z) >= 0.0 {
                pm.first
            } else {
                pm.second
            };
            votes[winner.index()] += 1;
        }
        Ok(Prediction::from_votes(votes))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("model: {e}")))
    }
}

pub fn predict(model: &SvmModel, x: &[f64]) -> Result<Prediction> {
    model.predict(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Four well-separated clusters in the plane.
    fn clusters() -> (Vec<Vec<f64>>, Vec<EmotionLabel>) {
        let centers = [(0.0, 0.0), (5.0, 0.0), (0.0, 5.0), (5.0, 5.0)];
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (k, (cx, cy)) in centers.iter().enumerate() {
            for j in 0..6 {
                let dx = (j % 3) as f64 * 0.3;
                let dy = (j / 3) as f64 * 0.3;
                rows.push(vec![cx + dx, cy + dy]);
                labels.push(EmotionLabel::ALL[k]);
            }
        }
        (rows, labels)
    }

    #[test]
    fn six_pairwise_models_and_perfect_fit() {
        let (rows, labels) = clusters();
        let m = train_multiclass_rows(&rows, &labels, &SvmConfig::default(), 1).unwrap();
        assert_eq!(m.pairwise.len(), 6);
        for (r, l) in rows.iter().zip(&labels) {
            let p = m.predict(r).unwrap();
            assert_eq!(p.label, *l);
            assert_eq!(p.distribution[l.index()], 0.5);
        }
    }

    #[test]
    fn missing_class_rejected() {
        let (rows, mut labels) = clusters();
        for l in labels.iter_mut() {
            if *l == EmotionLabel::Angry {
                *l = EmotionLabel::Sad;
            }
        }
        assert!(matches!(
            train_multiclass_rows(&rows, &labels, &SvmConfig::default(), 1),
            Err(Error::EmptyClass(EmotionLabel::Angry))
        ));
    }

    #[test]
    fn deterministic_support_sets() {
        let (rows, labels) = clusters();
        let a = train_multiclass_rows(&rows, &labels, &SvmConfig::default(), 3).unwrap();
        let b = train_multiclass_rows(&rows, &labels, &SvmConfig::default(), 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tie_breaks_to_lowest_index() {
        let p = Prediction::from_votes([2, 2, 2, 0]);
        assert_eq!(p.label, EmotionLabel::Happy);
        let p = Prediction::from_votes([0, 1, 3, 2]);
        assert_eq!(p.label, EmotionLabel::Sad);
        assert_eq!(p.distribution.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn json_round_trip_preserves_predictions() {
        let (rows, labels) = clusters();
        let m = train_multiclass_rows(&rows, &labels, &SvmConfig::default(), 1).unwrap();
        let back = SvmModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        for r in &rows {
            let probe: Vec<f64> = r.iter().map(|v| v * 0.97 + 0.11).collect();
            let (a, b) = (m.predict(&probe).unwrap(), back.predict(&probe).unwrap());
            assert_eq!(a, b);
            for pm in &m.pairwise {
                let z = m.norm.apply(&probe);
                let other = back
                    .pairwise
                    .iter()
                    .find(|q| q.first == pm.first && q.second == pm.second)
                    .unwrap();
                assert_eq!(
                    pm.model.decision(&z).to_bits(),
                    other.model.decision(&z).to_bits()
                );
            }
        }
    }
}
