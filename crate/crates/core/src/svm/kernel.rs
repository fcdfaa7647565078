use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial kernel `(<a, b> + coef0)^degree`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub coef0: f64,
    pub degree: u32,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            coef0: 1.0,
            degree: 3,
        }
    }
}

impl KernelParams {
    pub fn new(coef0: f64, degree: u32) -> Result<Self> {
        let p = KernelParams { coef0, degree };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::InvalidParameter("kernel degree must be >= 1".into()));
        }
        if !(self.coef0 >= 0.0 && self.coef0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kernel constant {} must be finite and >= 0",
                self.coef0
            )));
        }
        Ok(())
    }

    /// Unchecked evaluation; callers guarantee equal lengths.
    #[inline]
    pub(crate) fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        (dot + self.coef0).powi(self.degree as i32)
    }
}

pub fn poly_kernel(a: &[f64], b: &[f64], p: &KernelParams) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(p.eval(a, b))
}

/// Dense Gram matrix, row-major.
pub fn gram_matrix(x: &[Vec<f64>], p: &KernelParams) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = p.eval(&x[i], &x[j]);
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_cases() {
        let k = |a: &[f64], b: &[f64], c, d| {
            poly_kernel(a, b, &KernelParams::new(c, d).unwrap()).unwrap()
        };
        assert_eq!(k(&[1.0, 0.0], &[0.0, 1.0], 1.0, 2), 1.0);
        assert_eq!(k(&[1.0, 1.0], &[1.0, 1.0], 0.0, 1), 2.0);
        assert_eq!(k(&[1.0, 1.0], &[2.0, 0.0], 1.0, 3), 27.0);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(poly_kernel(&[1.0], &[1.0, 2.0], &KernelParams::default()).is_err());
    }

    #[test]
    fn invalid_params() {
        assert!(KernelParams::new(1.0, 0).is_err());
        assert!(KernelParams::new(-0.5, 2).is_err());
    }
}
