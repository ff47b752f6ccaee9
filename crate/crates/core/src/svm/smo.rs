//! Sequential minimal optimization for the soft-margin SVM dual
//!
//! ```text
//! min  ½ αᵀQα − eᵀα    s.t.  yᵀα = 0,  0 ≤ α ≤ C,    Q_ij = y_i y_j K(x_i, x_j)
//! ```
//!
//! Each step picks the maximal violating pair
//! `i = argmax_{t ∈ I_up} −y_t G_t`, `j = argmin_{t ∈ I_low} −y_t G_t`
//! (`G` the dual gradient) and solves the two-variable subproblem in closed
//! form. The gap `m(α) − M(α)` between those two extremes is the KKT
//! violation used as the stopping measure.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cache::KernelRows;
use super::kernel::KernelSpec;
use crate::error::{Error, Result};

const MIN_CURVATURE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoSettings {
    pub tol: f64,
    /// Consecutive sweeps (one sweep = `n` updates) without a new best KKT
    /// violation before the solver gives up.
    pub max_passes: usize,
    pub seed: u64,
    /// Precompute the full Gram matrix up to this many samples.
    pub full_gram_max: usize,
    /// Row-cache budget above `full_gram_max`.
    pub cache_bytes: usize,
}

impl Default for SmoSettings {
    fn default() -> Self {
        SmoSettings {
            tol: 1e-3,
            max_passes: 10,
            seed: 0,
            full_gram_max: 8192,
            cache_bytes: 256 << 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingStats {
    pub iterations: u64,
    pub kkt_violation_max: f64,
    pub converged: bool,
}

/// A trained binary classifier. Positive decision values mean label `+1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `α_i · y_i` for each support vector.
    pub alphas_times_labels: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelSpec,
    pub c: f64,
    pub training_stats: TrainingStats,
}

impl SvmModel {
    pub fn dim(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        let dim = self.dim();
        if !self.support_vectors.is_empty() && x.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                actual: x.len(),
            });
        }
        Ok(self
            .support_vectors
            .iter()
            .zip(&self.alphas_times_labels)
            .map(|(sv, a)| a * self.kernel.eval_unchecked(sv, x))
            .sum::<f64>()
            + self.bias)
    }
}

pub fn decision(model: &SvmModel, x: &[f64]) -> Result<f64> {
    model.decision(x)
}

fn check_inputs(x: &[Vec<f64>], y: &[f64], c: f64, spec: &KernelSpec) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Config(format!("C must be positive, got {c}")));
    }
    spec.validate()?;
    let dim = x[0].len();
    for (k, v) in x.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                actual: v.len(),
            });
        }
        if v.iter().any(|f| !f.is_finite()) {
            return Err(Error::NonFinite { sample: k });
        }
    }
    if let Some(bad) = y.iter().find(|&&l| l != 1.0 && l != -1.0) {
        return Err(Error::Config(format!("labels must be +1 or -1, got {bad}")));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(Error::SingleClass);
    }
    Ok(())
}

pub fn smo_train(
    x: &[Vec<f64>],
    y: &[f64],
    c: f64,
    spec: KernelSpec,
    settings: &SmoSettings,
) -> Result<SvmModel> {
    check_inputs(x, y, c, &spec)?;
    let n = x.len();
    let mut rows = KernelRows::new(x, spec, settings.full_gram_max, settings.cache_bytes);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];

    // Scan order only decides ties between equally violating indices.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(settings.seed));

    let max_iter = (100 * n as u64).max(10_000_000);
    let mut iterations = 0u64;
    let mut best_violation = f64::INFINITY;
    let mut stalled_passes = 0usize;
    let mut since_pass = 0usize;
    let mut converged = false;
    let mut violation;

    loop {
        let (mut gmax, mut gmin) = (f64::NEG_INFINITY, f64::INFINITY);
        let (mut i, mut j) = (usize::MAX, usize::MAX);
        for &t in &order {
            let v = -y[t] * grad[t];
            let up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
            let low = (y[t] < 0.0 && alpha[t] < c) || (y[t] > 0.0 && alpha[t] > 0.0);
            if up && v > gmax {
                gmax = v;
                i = t;
            }
            if low && v < gmin {
                gmin = v;
                j = t;
            }
        }
        violation = if i == usize::MAX || j == usize::MAX {
            0.0
        } else {
            gmax - gmin
        };
        if violation <= settings.tol {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        if violation < best_violation {
            best_violation = violation;
            stalled_passes = 0;
        }
        since_pass += 1;
        if since_pass == n {
            since_pass = 0;
            stalled_passes += 1;
            if stalled_passes > settings.max_passes {
                break;
            }
        }
        iterations += 1;

        let row_i = rows.row(i);
        let row_j = rows.row(j);
        let (kii, kjj, kij) = (rows.diag(i), rows.diag(j), row_i[j]);
        let curvature = (kii + kjj - 2.0 * kij).max(MIN_CURVATURE);
        let (old_i, old_j) = (alpha[i], alpha[j]);

        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / curvature;
            let diff = old_i - old_j;
            let (mut ai, mut aj) = (old_i + delta, old_j + delta);
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
            alpha[i] = ai;
            alpha[j] = aj;
        } else {
            let delta = (grad[i] - grad[j]) / curvature;
            let sum = old_i + old_j;
            let (mut ai, mut aj) = (old_i - delta, old_j + delta);
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
            alpha[i] = ai;
            alpha[j] = aj;
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * row_i[t] * di + y[j] * row_j[t] * dj);
        }
    }

    let bias = -offset(&alpha, &grad, y, c);
    let mut support_vectors = Vec::new();
    let mut coefs = Vec::new();
    for t in 0..n {
        if alpha[t] > 0.0 {
            support_vectors.push(x[t].clone());
            coefs.push(alpha[t] * y[t]);
        }
    }
    Ok(SvmModel {
        support_vectors,
        alphas_times_labels: coefs,
        bias,
        kernel: spec,
        c,
        training_stats: TrainingStats {
            iterations,
            kkt_violation_max: violation,
            converged,
        },
    })
}

/// Threshold `ρ` with `f(x) = Σ α_i y_i K(x_i, x) − ρ`: the mean of `y_t G_t`
/// over free multipliers, or the midpoint of the feasible interval when
/// every multiplier sits at a bound.
fn offset(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let (mut upper, mut lower) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut free_sum) = (0usize, 0.0);
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else {
        (upper + lower) / 2.0
    }
}
