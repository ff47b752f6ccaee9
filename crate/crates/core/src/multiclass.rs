//! One-vs-one training and voting.
//!
//! Every unordered class pair `(x, y)`, `x < y`, gets its own mask, features
//! and SVM. At predict time each pair casts one vote: a positive decision
//! votes for `x`, anything else for `y`. The class with the most votes wins;
//! ties go to the larger accumulated `|decision|`, then the lower class id.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cdf::{build_pair_context, class_profile, extract_pair_features, pair_features, RestrictedProfiles};
use crate::data::{ClassId, Dataset};
use crate::error::{Error, Result};
use crate::model::{CdfModel, ModelConfig, TrainedPair, MODEL_FORMAT};
use crate::svm::{grid_search, smo_train, CvResult, GridCell, SmoSettings, SvmModel, SvmParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoteRecord {
    pub votes: Vec<u32>,
    pub margin_sums: Vec<f64>,
    pub winner: ClassId,
}

/// Tallies `(x, y, decision)` outcomes into a [`VoteRecord`].
pub fn tally<I>(num_classes: usize, outcomes: I) -> VoteRecord
where
    I: IntoIterator<Item = (ClassId, ClassId, f64)>,
{
    let mut votes = vec![0u32; num_classes];
    let mut margin_sums = vec![0.0; num_classes];
    for (x, y, d) in outcomes {
        let voted = if d > 0.0 { x } else { y };
        votes[voted] += 1;
        margin_sums[voted] += d.abs();
    }
    let mut winner = 0;
    for c in 1..num_classes {
        let better = votes[c] > votes[winner]
            || (votes[c] == votes[winner] && margin_sums[c] > margin_sums[winner]);
        if better {
            winner = c;
        }
    }
    VoteRecord {
        votes,
        margin_sums,
        winner,
    }
}

/// Unordered class pairs in lexicographic order.
pub fn class_pairs(num_classes: usize) -> Vec<(ClassId, ClassId)> {
    (0..num_classes)
        .flat_map(|x| (x + 1..num_classes).map(move |y| (x, y)))
        .collect()
}

fn pair_settings(base: &SmoSettings, pair_index: usize) -> SmoSettings {
    SmoSettings {
        seed: base
            .seed
            .wrapping_add((pair_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        ..base.clone()
    }
}

fn fit_pair_svm(features: &[Vec<f64>], labels: &[f64], params: &SvmParams, pair_index: usize) -> Result<SvmModel> {
    let feature_dim = features.first().map_or(1, Vec::len);
    smo_train(
        features,
        labels,
        params.c,
        params.kernel.resolve(feature_dim),
        &pair_settings(&params.solver, pair_index),
    )
}

/// Trains the full one-vs-one CDF model. Pairs are trained in parallel; the
/// result does not depend on scheduling.
pub fn train(dataset: &Dataset, config: &ModelConfig) -> Result<CdfModel> {
    config.validate()?;
    let m = dataset.num_classes();
    if m < 2 {
        return Err(Error::SingleClass);
    }
    let profiles = (0..m)
        .into_par_iter()
        .map(|c| class_profile(dataset, c))
        .collect::<Result<Vec<_>>>()?;

    let pairs = class_pairs(m)
        .into_par_iter()
        .enumerate()
        .map(|(index, (x, y))| {
            train_pair(dataset, &profiles[x], &profiles[y], config, index).map_err(|e| Error::Pair {
                x,
                y,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CdfModel {
        format: MODEL_FORMAT.to_string(),
        config: config.clone(),
        num_classes: m,
        dim: dataset.dim(),
        label_names: dataset.label_names().to_vec(),
        vocabulary: None,
        profiles,
        pairs,
    })
}

fn train_pair(
    dataset: &Dataset,
    profile_x: &crate::data::ClassProfile,
    profile_y: &crate::data::ClassProfile,
    config: &ModelConfig,
    index: usize,
) -> Result<TrainedPair> {
    let (x, y) = (profile_x.class_id, profile_y.class_id);
    let context = build_pair_context(profile_x, profile_y, &config.cdf)?;
    let set = extract_pair_features(
        dataset.class_samples(x),
        dataset.class_samples(y),
        &context,
        profile_x,
        profile_y,
        &config.cdf,
    )?;
    let svm = fit_pair_svm(&set.features, &set.labels, &config.svm, index)?;
    let profiles = RestrictedProfiles::new(profile_x, profile_y, &context.mask);
    Ok(TrainedPair {
        context,
        profiles,
        svm,
    })
}

fn check_dim(expected: usize, sample: &[f64], index: usize) -> Result<()> {
    if sample.len() != expected {
        return Err(Error::SampleDimension {
            sample: index,
            expected,
            actual: sample.len(),
        });
    }
    Ok(())
}

/// Pair decision values in pair order.
pub fn pair_decisions(model: &CdfModel, sample: &[f64]) -> Result<Vec<(ClassId, ClassId, f64)>> {
    check_dim(model.dim, sample, 0)?;
    let cfg = &model.config.cdf;
    model
        .pairs
        .iter()
        .map(|p| {
            let f = pair_features(sample, &p.context.mask, &p.profiles, cfg.feature_mode, cfg.smoothing_eps)?;
            Ok((p.context.class_x, p.context.class_y, p.svm.decision(&f)?))
        })
        .collect()
}

pub fn predict(model: &CdfModel, sample: &[f64]) -> Result<(ClassId, VoteRecord)> {
    let record = tally(model.num_classes, pair_decisions(model, sample)?);
    Ok((record.winner, record))
}

/// [`predict`] over many samples, in input order.
pub fn predict_batch(model: &CdfModel, samples: &[Vec<f64>]) -> Result<Vec<(ClassId, VoteRecord)>> {
    for (k, s) in samples.iter().enumerate() {
        check_dim(model.dim, s, k)?;
    }
    samples.par_iter().map(|s| predict(model, s)).collect()
}

/// `base` with one grid cell's C, kernel and multipliers substituted.
pub fn apply_cell(base: &ModelConfig, cell: &GridCell) -> ModelConfig {
    let mut cfg = base.clone();
    cfg.svm.c = cell.c;
    cfg.svm.kernel = cell.kernel;
    cfg.cdf.b = cell.b;
    cfg.cdf.b_prime = cell.b_prime;
    cfg
}

/// Stratified n-fold search over the whole CDF pipeline, seeded from
/// `base.svm.solver.seed`.
pub fn cross_validate(dataset: &Dataset, grid: &[GridCell], folds: usize, base: &ModelConfig) -> Result<CvResult> {
    grid_search(
        dataset.labels(),
        grid,
        folds,
        base.svm.solver.seed,
        |cell, train_idx, val_idx| {
            let model = train(&dataset.subset(train_idx)?, &apply_cell(base, cell))?;
            let mut correct = 0usize;
            for &k in val_idx {
                if predict(&model, &dataset.vectors()[k])?.0 == dataset.labels()[k] {
                    correct += 1;
                }
            }
            Ok(correct as f64 / val_idx.len() as f64)
        },
    )
}

/// One-vs-one SVMs on the raw input vectors, without any CDF step. This is
/// the classification stack behind the TF-IDF baseline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseSvm {
    pub num_classes: usize,
    pub dim: usize,
    pub pairs: Vec<(ClassId, ClassId, SvmModel)>,
}

impl PairwiseSvm {
    pub fn train(dataset: &Dataset, params: &SvmParams) -> Result<Self> {
        let m = dataset.num_classes();
        if m < 2 {
            return Err(Error::SingleClass);
        }
        let pairs = class_pairs(m)
            .into_par_iter()
            .enumerate()
            .map(|(index, (x, y))| {
                let mut features = Vec::new();
                let mut labels = Vec::new();
                for (class, label) in [(x, 1.0), (y, -1.0)] {
                    for s in dataset.class_samples(class) {
                        features.push(s.to_vec());
                        labels.push(label);
                    }
                }
                fit_pair_svm(&features, &labels, params, index)
                    .map(|svm| (x, y, svm))
                    .map_err(|e| Error::Pair {
                        x,
                        y,
                        source: Box::new(e),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PairwiseSvm {
            num_classes: m,
            dim: dataset.dim(),
            pairs,
        })
    }

    pub fn predict(&self, sample: &[f64]) -> Result<(ClassId, VoteRecord)> {
        check_dim(self.dim, sample, 0)?;
        let outcomes = self
            .pairs
            .iter()
            .map(|(x, y, svm)| Ok((*x, *y, svm.decision(sample)?)))
            .collect::<Result<Vec<_>>>()?;
        let record = tally(self.num_classes, outcomes);
        Ok((record.winner, record))
    }

    pub fn predict_batch(&self, samples: &[Vec<f64>]) -> Result<Vec<(ClassId, VoteRecord)>> {
        for (k, s) in samples.iter().enumerate() {
            check_dim(self.dim, s, k)?;
        }
        samples.par_iter().map(|s| self.predict(s)).collect()
    }
}
