use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-feature min/max learned on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    pub fn fit<V: AsRef<[f64]>>(rows: &[V]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidParameter("cannot fit normalization on no data".into()))?
            .as_ref();
        let mut min = first.to_vec();
        let mut max = first.to_vec();
        for row in &rows[1..] {
            let row = row.as_ref();
            if row.len() != min.len() {
                return Err(Error::LengthMismatch {
                    left: min.len(),
                    right: row.len(),
                });
            }
            for ((lo, hi), &v) in min.iter_mut().zip(max.iter_mut()).zip(row) {
                *lo = lo.min(v);
                *hi = hi.max(v);
            }
        }
        Ok(NormalizationParams { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Maps into [0, 1]; constant features map to 0 and out-of-range values
    /// are clamped.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| {
                let range = hi - lo;
                if range > 0.0 {
                    ((v - lo) / range).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect()
    }
}
