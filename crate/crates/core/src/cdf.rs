//! Class-dependent feature selection and extraction.
//!
//! For a pair of classes `(x, y)` the pipeline is:
//!
//! 1. per-class sums and means ([`class_sum`], [`class_mean`]) give each
//!    class a profile vector;
//! 2. the smoothed per-dimension ratio of the two profiles
//!    ([`pair_ratios`]) and its mean ([`pair_mean`]) in both directions,
//!    scaled by the multipliers `b` and `b'`, give the thresholds
//!    ([`thresholds`]);
//! 3. dimensions that beat either threshold form the pair's mask
//!    ([`select_indices`]);
//! 4. every sample, and both profiles, are restricted to the mask and
//!    L1-normalized ([`restrict_normalize`]), and the sample is described by
//!    its KL divergence from the profiles ([`pair_features`]).

use crate::config::{CdfConfig, FeatureMode, Multipliers, SelectionMode};
use crate::data::{ClassId, ClassProfile, Dataset, PairContext, PairFeatureSet};
use crate::error::{Error, Result};

/// Tolerance on `sum == 1` accepted by [`kl_divergence`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Component-wise sum of equal-length vectors, with Neumaier compensation
/// per component.
pub fn class_sum<'a, I>(samples: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut iter = samples.into_iter();
    let mut acc = iter.next().ok_or(Error::Empty("class has no samples"))?.to_vec();
    let mut carry = vec![0.0; acc.len()];
    for s in iter {
        if s.len() != acc.len() {
            return Err(Error::LengthMismatch {
                expected: acc.len(),
                actual: s.len(),
            });
        }
        for ((a, c), &v) in acc.iter_mut().zip(carry.iter_mut()).zip(s) {
            let t = *a + v;
            if a.abs() >= v.abs() {
                *c += (*a - t) + v;
            } else {
                *c += (v - t) + *a;
            }
            *a = t;
        }
    }
    for (a, c) in acc.iter_mut().zip(carry) {
        *a += c;
    }
    Ok(acc)
}

pub fn class_mean(sum_vec: &[f64], cardinality: usize) -> Result<Vec<f64>> {
    if cardinality == 0 {
        return Err(Error::Empty("class cardinality is zero"));
    }
    let m = cardinality as f64;
    Ok(sum_vec.iter().map(|a| a / m).collect())
}

pub fn class_profile(dataset: &Dataset, class: ClassId) -> Result<ClassProfile> {
    let sum_vec = class_sum(dataset.class_samples(class))?;
    let cardinality = dataset.class_index(class).len();
    let mean_vec = class_mean(&sum_vec, cardinality)?;
    Ok(ClassProfile {
        class_id: class,
        sum_vec,
        mean_vec,
        cardinality,
    })
}

/// `(t_x[i] + eps) / (t_y[i] + eps)` for every dimension.
pub fn pair_ratios(t_x: &[f64], t_y: &[f64], eps: f64) -> Result<Vec<f64>> {
    if t_x.len() != t_y.len() {
        return Err(Error::LengthMismatch {
            expected: t_x.len(),
            actual: t_y.len(),
        });
    }
    Ok(t_x
        .iter()
        .zip(t_y)
        .map(|(a, b)| (a + eps) / (b + eps))
        .collect())
}

pub fn pair_mean(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() {
        return Err(Error::Empty("ratio vector"));
    }
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

/// `(b * mu_xy, b' * mu_yx)`.
pub fn thresholds(mu_xy: f64, mu_yx: f64, m: Multipliers) -> (f64, f64) {
    (m.b * mu_xy, m.b_prime * mu_yx)
}

/// Result of the threshold rule for one pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    /// Union of both sides, or the fallback index.
    pub mask: Vec<usize>,
    /// Indices accepted by the x-side condition.
    pub x_side: Vec<usize>,
    /// Indices accepted by the y-side condition.
    pub y_side: Vec<usize>,
    pub fallback: bool,
}

pub fn select_indices(
    t_x: &[f64],
    t_y: &[f64],
    tau: f64,
    tau_prime: f64,
    mode: SelectionMode,
    eps: f64,
) -> Result<Selection> {
    if t_x.len() != t_y.len() {
        return Err(Error::LengthMismatch {
            expected: t_x.len(),
            actual: t_y.len(),
        });
    }
    if t_x.is_empty() {
        return Err(Error::Empty("profile vector"));
    }
    let mut x_side = Vec::new();
    let mut y_side = Vec::new();
    for (i, (&a, &b)) in t_x.iter().zip(t_y).enumerate() {
        let (x_hit, y_hit) = match mode {
            SelectionMode::Ratio => ((a + eps) / (b + eps) > tau, (b + eps) / (a + eps) > tau_prime),
            SelectionMode::Literal => (a > tau || a > tau_prime, b > tau || b > tau_prime),
        };
        if x_hit {
            x_side.push(i);
        }
        if y_hit {
            y_side.push(i);
        }
    }
    let mut mask: Vec<usize> = x_side.iter().chain(&y_side).copied().collect();
    mask.sort_unstable();
    mask.dedup();

    let fallback = mask.is_empty();
    if fallback {
        // Lowest index wins ties.
        let mut best = 0;
        let mut best_diff = f64::NEG_INFINITY;
        for (i, (a, b)) in t_x.iter().zip(t_y).enumerate() {
            let d = (a - b).abs();
            if d > best_diff {
                best = i;
                best_diff = d;
            }
        }
        mask.push(best);
    }
    Ok(Selection {
        mask,
        x_side,
        y_side,
        fallback,
    })
}

/// Builds the selection context for the pair `(x, y)` from its profiles.
pub fn build_pair_context(
    profile_x: &ClassProfile,
    profile_y: &ClassProfile,
    cfg: &CdfConfig,
) -> Result<PairContext> {
    let eps = cfg.smoothing_eps;
    let (x, y) = (profile_x.class_id, profile_y.class_id);
    let ratios_xy = pair_ratios(&profile_x.mean_vec, &profile_y.mean_vec, eps)?;
    let ratios_yx = pair_ratios(&profile_y.mean_vec, &profile_x.mean_vec, eps)?;
    let mu_xy = pair_mean(&ratios_xy)?;
    let mu_yx = pair_mean(&ratios_yx)?;
    let multipliers = cfg.multipliers_for(x, y);
    let (tau, tau_prime) = thresholds(mu_xy, mu_yx, multipliers);
    let selection = select_indices(
        &profile_x.mean_vec,
        &profile_y.mean_vec,
        tau,
        tau_prime,
        cfg.selection_mode,
        eps,
    )?;
    Ok(PairContext {
        class_x: x,
        class_y: y,
        ratios_xy,
        mu_xy,
        mu_yx,
        b: multipliers.b,
        b_prime: multipliers.b_prime,
        tau,
        tau_prime,
        mask: selection.mask,
        selection_mode: cfg.selection_mode,
        smoothing_eps: eps,
        fallback: selection.fallback,
    })
}

/// A sample restricted to a mask and L1-normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct Restricted {
    pub values: Vec<f64>,
    /// The restricted sample had no mass; `values` is uniform.
    pub degenerate: bool,
}

pub fn restrict_normalize(sample: &[f64], mask: &[usize]) -> Restricted {
    let mut values: Vec<f64> = mask.iter().map(|&i| sample[i]).collect();
    let total: f64 = values.iter().sum();
    if total > 0.0 {
        for v in &mut values {
            *v /= total;
        }
        Restricted {
            values,
            degenerate: false,
        }
    } else {
        let u = 1.0 / mask.len() as f64;
        values.iter_mut().for_each(|v| *v = u);
        Restricted {
            values,
            degenerate: true,
        }
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if let Some((index, &value)) = p.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidComponent { index, value });
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// One term `p * ln(p / (q + eps))`, zero when `p` is zero.
#[inline]
pub fn kl_term(p: f64, q: f64, eps: f64) -> f64 {
    if p > 0.0 {
        p * (p / (q + eps)).ln()
    } else {
        0.0
    }
}

/// `KL(p || q)` in nats, with `eps` added to every `q` component.
///
/// The smoothing makes the smoothed `q` sum to slightly more than one, so the
/// raw sum can dip below zero by at most `len * eps` when `p` and `q`
/// (nearly) coincide; such values are clamped to zero.
pub fn kl_divergence(p: &[f64], q: &[f64], eps: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            actual: q.len(),
        });
    }
    check_distribution(p)?;
    check_distribution(q)?;
    let d: f64 = p.iter().zip(q).map(|(&a, &b)| kl_term(a, b, eps)).sum();
    Ok(d.max(0.0))
}

/// Both profiles restricted to a pair's mask.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RestrictedProfiles {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl RestrictedProfiles {
    pub fn new(profile_x: &ClassProfile, profile_y: &ClassProfile, mask: &[usize]) -> Self {
        RestrictedProfiles {
            x: restrict_normalize(&profile_x.mean_vec, mask).values,
            y: restrict_normalize(&profile_y.mean_vec, mask).values,
        }
    }
}

/// Feature vector for one sample under a pair's mask.
pub fn pair_features(
    sample: &[f64],
    mask: &[usize],
    profiles: &RestrictedProfiles,
    mode: FeatureMode,
    eps: f64,
) -> Result<Vec<f64>> {
    if let Some(&i) = mask.iter().find(|&&i| i >= sample.len()) {
        return Err(Error::LengthMismatch {
            expected: i + 1,
            actual: sample.len(),
        });
    }
    let p = restrict_normalize(sample, mask).values;
    Ok(match mode {
        FeatureMode::DualKl => vec![
            kl_divergence(&p, &profiles.x, eps)?,
            kl_divergence(&p, &profiles.y, eps)?,
        ],
        FeatureMode::ScalarKl => vec![kl_divergence(&p, &profiles.x, eps)?],
        FeatureMode::ElementwiseKl => p
            .iter()
            .zip(&profiles.x)
            .map(|(&a, &b)| kl_term(a, b, eps))
            .collect(),
    })
}

/// Features and ±1 labels for every x sample followed by every y sample.
pub fn extract_pair_features<'a, X, Y>(
    samples_x: X,
    samples_y: Y,
    ctx: &PairContext,
    profile_x: &ClassProfile,
    profile_y: &ClassProfile,
    cfg: &CdfConfig,
) -> Result<PairFeatureSet>
where
    X: IntoIterator<Item = &'a [f64]>,
    Y: IntoIterator<Item = &'a [f64]>,
{
    if ctx.mask.is_empty() {
        return Err(Error::Empty("pair mask"));
    }
    let profiles = RestrictedProfiles::new(profile_x, profile_y, &ctx.mask);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (label, samples) in [(1.0, samples_x.into_iter().collect::<Vec<_>>()), (-1.0, samples_y.into_iter().collect())] {
        for s in samples {
            features.push(pair_features(
                s,
                &ctx.mask,
                &profiles,
                cfg.feature_mode,
                cfg.smoothing_eps,
            )?);
            labels.push(label);
        }
    }
    Ok(PairFeatureSet {
        features,
        labels,
        feature_mode: cfg.feature_mode,
    })
}
