//! Sequential minimal optimization for the soft-margin SVM dual
//!
//! ```text
//! max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij
//! s.t. 0 <= a_i <= C,  sum(a_i y_i) = 0
//! ```
//!
//! The main loop follows Platt: alternate full sweeps and sweeps over the
//! non-bound multipliers, choose the partner that maximizes |E1 - E2|, and
//! fall back to scanning from a random start. If the sweeps stall while a KKT
//! violation above `tol` remains, a maximal-violating-pair phase finishes the
//! job and places the bias at the midpoint of the feasible interval.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::kernel::{gram_matrix, KernelParams};
use crate::error::{Error, Result};
use crate::rng::{seeded, Rng};

/// Multipliers at or below this are not support vectors.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;
pub const DEFAULT_MAX_PASSES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoSettings {
    pub penalty: f64,
    pub tol: f64,
    pub max_passes: usize,
    pub seed: u64,
}

impl SmoSettings {
    pub fn new(penalty: f64, tol: f64, seed: u64) -> Self {
        SmoSettings {
            penalty,
            tol,
            max_passes: DEFAULT_MAX_PASSES,
            seed,
        }
    }
}

/// Raw solver output over the full training set.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub passes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// Position of each support vector in the training set.
    pub support_indices: Vec<usize>,
    pub alphas: Vec<f64>,
    pub signs: Vec<f64>,
    pub bias: f64,
    pub penalty: f64,
    pub kernel: KernelParams,
}

impl BinaryModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(self.alphas.iter().zip(&self.signs))
            .map(|(sv, (a, s))| a * s * self.kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias
    }

    /// Multiplier of every training point (zero for non-support vectors).
    pub fn full_alphas(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (&i, &a) in self.support_indices.iter().zip(&self.alphas) {
            out[i] = a;
        }
        out
    }
}

fn check_inputs(x: &[Vec<f64>], y: &[f64], s: &SmoSettings) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if !(s.penalty > 0.0 && s.penalty.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "C = {} must be positive",
            s.penalty
        )));
    }
    if s.tol.is_nan() || s.tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tol = {} must be positive",
            s.tol
        )));
    }
    if let Some(&bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidParameter(format!(
            "label {bad} is not +1 or -1"
        )));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(Error::SingleClass);
    }
    if let Some(d) = x.first().map(Vec::len) {
        for row in x {
            if row.len() != d {
                return Err(Error::LengthMismatch {
                    left: d,
                    right: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("non-finite feature value".into()));
            }
        }
    }
    Ok(())
}

pub fn train_binary_smo(
    x: &[Vec<f64>],
    y: &[f64],
    kernel: &KernelParams,
    settings: &SmoSettings,
) -> Result<BinaryModel> {
    check_inputs(x, y, settings)?;
    kernel.validate()?;
    let gram = gram_matrix(x, kernel);
    let sol = solve_dual(&gram, y, settings)?;

    let mut model = BinaryModel {
        support_vectors: Vec::new(),
        support_indices: Vec::new(),
        alphas: Vec::new(),
        signs: Vec::new(),
        bias: sol.bias,
        penalty: settings.penalty,
        kernel: *kernel,
    };
    for (i, &a) in sol.alphas.iter().enumerate() {
        if a > SUPPORT_THRESHOLD {
            model.support_vectors.push(x[i].clone());
            model.support_indices.push(i);
            model.alphas.push(a);
            model.signs.push(y[i]);
        }
    }
    Ok(model)
}

/// Solves the dual for a precomputed Gram matrix.
pub fn solve_dual(gram: &[Vec<f64>], y: &[f64], settings: &SmoSettings) -> Result<DualSolution> {
    let mut s = Solver::new(gram, y, settings);
    s.platt_sweeps()?;
    if s.max_violation() > s.tol {
        s.polish()?;
    }
    Ok(DualSolution {
        alphas: s.alpha,
        bias: s.bias,
        passes: s.passes,
    })
}

struct Solver<'a> {
    k: &'a [Vec<f64>],
    y: &'a [f64],
    c: f64,
    tol: f64,
    max_passes: usize,
    alpha: Vec<f64>,
    bias: f64,
    /// E_i = f(x_i) - y_i under the current multipliers and bias.
    err: Vec<f64>,
    rng: Rng,
    passes: usize,
}

const STEP_EPS: f64 = 1e-12;

impl<'a> Solver<'a> {
    fn new(k: &'a [Vec<f64>], y: &'a [f64], st: &SmoSettings) -> Self {
        Solver {
            k,
            y,
            c: st.penalty,
            tol: st.tol,
            max_passes: st.max_passes,
            alpha: vec![0.0; y.len()],
            bias: 0.0,
            err: y.iter().map(|v| -v).collect(),
            rng: seeded(st.seed),
            passes: 0,
        }
    }

    fn n(&self) -> usize {
        self.y.len()
    }

    fn is_free(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.c
    }

    fn violation(&self, i: usize) -> f64 {
        let r = self.err[i] * self.y[i];
        let a = self.alpha[i];
        let mut v: f64 = 0.0;
        if a < self.c {
            v = v.max(-r);
        }
        if a > 0.0 {
            v = v.max(r);
        }
        v
    }

    fn max_violation(&self) -> f64 {
        (0..self.n()).map(|i| self.violation(i)).fold(0.0, f64::max)
    }

    fn next_pass(&mut self) -> Result<()> {
        self.passes += 1;
        if self.passes > self.max_passes {
            return Err(Error::Convergence {
                passes: self.max_passes,
                max_violation: self.max_violation(),
            });
        }
        Ok(())
    }

    fn platt_sweeps(&mut self) -> Result<()> {
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.shuffle(&mut self.rng);
        let mut examine_all = true;
        let mut changed = 0usize;
        while changed > 0 || examine_all {
            self.next_pass()?;
            changed = 0;
            for &i in &order {
                if examine_all || self.is_free(i) {
                    changed += usize::from(self.examine(i));
                }
            }
            if examine_all {
                examine_all = false;
            } else if changed == 0 {
                examine_all = true;
            }
        }
        Ok(())
    }

    fn examine(&mut self, i2: usize) -> bool {
        if self.violation(i2) <= self.tol {
            return false;
        }
        let n = self.n();
        let e2 = self.err[i2];

        // second choice: the free multiplier with the largest |E1 - E2|
        let best = (0..n)
            .filter(|&i| i != i2 && self.is_free(i))
            .max_by(|&a, &b| {
                (self.err[a] - e2)
                    .abs()
                    .total_cmp(&(self.err[b] - e2).abs())
            });
        if let Some(i1) = best {
            if self.take_step(i1, i2) {
                return true;
            }
        }
        let start = self.rng.random_range(0..n);
        for off in 0..n {
            let i1 = (start + off) % n;
            if self.is_free(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        let start = self.rng.random_range(0..n);
        for off in 0..n {
            let i1 = (start + off) % n;
            if self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let c = self.c;
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (e1, e2) = (self.err[i1], self.err[i2]);
        let s = y1 * y2;
        let (lo, hi) = if s < 0.0 {
            ((a2 - a1).max(0.0), (c + a2 - a1).min(c))
        } else {
            ((a2 + a1 - c).max(0.0), (a2 + a1).min(c))
        };
        if hi - lo <= STEP_EPS * c {
            return false;
        }
        let (k11, k12, k22) = (self.k[i1][i1], self.k[i1][i2], self.k[i2][i2]);
        let eta = k11 + k22 - 2.0 * k12;

        let mut a2_new = if eta > STEP_EPS * (k11 + k22).abs().max(1.0) {
            (a2 + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // objective is linear (or convex) along the line: pick the better end
            let gain = |t: f64| t * y2 * (e1 - e2) - 0.5 * eta * t * t;
            let (g_lo, g_hi) = (gain(lo - a2), gain(hi - a2));
            if g_lo > g_hi + STEP_EPS {
                lo
            } else if g_hi > g_lo + STEP_EPS {
                hi
            } else {
                a2
            }
        };
        if a2_new < STEP_EPS * c {
            a2_new = 0.0;
        } else if a2_new > c * (1.0 - STEP_EPS) {
            a2_new = c;
        }
        if (a2_new - a2).abs() < STEP_EPS * (a2_new + a2 + STEP_EPS) {
            return false;
        }
        let mut a1_new = a1 + s * (a2 - a2_new);
        // keep sum(a y) exact when rounding pushes a1 past a bound
        if a1_new < STEP_EPS * c {
            a2_new += s * a1_new;
            a1_new = 0.0;
        } else if a1_new > c * (1.0 - STEP_EPS) {
            a2_new += s * (a1_new - c);
            a1_new = c;
        }
        a2_new = a2_new.clamp(0.0, c);
        if a2_new < STEP_EPS * c {
            a2_new = 0.0;
        } else if a2_new > c * (1.0 - STEP_EPS) {
            a2_new = c;
        }

        let d1 = y1 * (a1_new - a1);
        let d2 = y2 * (a2_new - a2);
        let b1 = self.bias - e1 - d1 * k11 - d2 * k12;
        let b2 = self.bias - e2 - d1 * k12 - d2 * k22;
        let free1 = a1_new > 0.0 && a1_new < c;
        let free2 = a2_new > 0.0 && a2_new < c;
        let b_new = if free1 {
            b1
        } else if free2 {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let db = b_new - self.bias;

        for i in 0..self.n() {
            self.err[i] += d1 * self.k[i][i1] + d2 * self.k[i][i2] + db;
        }
        self.alpha[i1] = a1_new;
        self.alpha[i2] = a2_new;
        self.bias = b_new;
        true
    }

    /// Maximal violating pair iterations until the bias interval closes to
    /// within `2 tol`, then centers the bias.
    fn polish(&mut self) -> Result<()> {
        let n = self.n();
        let mut steps = 0usize;
        loop {
            // F_i = f(x_i) - y_i - b, independent of the bias
            let mut up = (f64::INFINITY, usize::MAX);
            let mut low = (f64::NEG_INFINITY, usize::MAX);
            for i in 0..n {
                let f = self.err[i] - self.bias;
                let (a, y) = (self.alpha[i], self.y[i]);
                let in_up = (y > 0.0 && a < self.c) || (y < 0.0 && a > 0.0);
                let in_low = (y > 0.0 && a > 0.0) || (y < 0.0 && a < self.c);
                if in_up && f < up.0 {
                    up = (f, i);
                }
                if in_low && f > low.0 {
                    low = (f, i);
                }
            }
            if low.0 <= up.0 + 2.0 * self.tol {
                let centered = -0.5 * (up.0 + low.0);
                let db = centered - self.bias;
                for e in &mut self.err {
                    *e += db;
                }
                self.bias = centered;
                return Ok(());
            }
            steps += 1;
            if steps.is_multiple_of(n.max(1)) {
                self.next_pass()?;
            }
            if !self.take_step(up.1, low.1) {
                return Err(Error::Convergence {
                    passes: self.passes,
                    max_violation: 0.5 * (low.0 - up.0),
                });
            }
        }
    }
}

/// Dual objective value for multipliers `alphas`.
pub fn dual_objective(alphas: &[f64], y: &[f64], gram: &[Vec<f64>]) -> f64 {
    let linear: f64 = alphas.iter().sum();
    let mut quad = 0.0;
    for i in 0..alphas.len() {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..alphas.len() {
            quad += alphas[i] * alphas[j] * y[i] * y[j] * gram[i][j];
        }
    }
    linear - 0.5 * quad
}

/// Post-hoc optimality check of a trained model against its training data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport {
    pub max_violation: f64,
    pub equality_residual: f64,
    pub box_ok: bool,
}

impl KktReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.box_ok && self.max_violation <= tol && self.equality_residual <= 1e-6
    }
}

/// Re-evaluates the decision function from the model's support vectors and
/// checks the tol-relaxed KKT conditions on every training point.
pub fn verify_kkt(model: &BinaryModel, x: &[Vec<f64>], y: &[f64]) -> KktReport {
    let c = model.penalty;
    let alphas = model.full_alphas(x.len());
    let mut worst: f64 = 0.0;
    for ((xi, &yi), &a) in x.iter().zip(y).zip(&alphas) {
        let margin = yi * model.decision(xi) - 1.0;
        let at_zero = a <= SUPPORT_THRESHOLD;
        let at_c = a >= c - SUPPORT_THRESHOLD;
        let v = if at_zero {
            (-margin).max(0.0)
        } else if at_c {
            margin.max(0.0)
        } else {
            margin.abs()
        };
        worst = worst.max(v);
    }
    let equality_residual = model
        .alphas
        .iter()
        .zip(&model.signs)
        .map(|(a, s)| a * s)
        .sum::<f64>()
        .abs();
    let box_ok = model.alphas.iter().all(|&a| (0.0..=c).contains(&a));
    KktReport {
        max_violation: worst,
        equality_residual,
        box_ok,
    }
}
