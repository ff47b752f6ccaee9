//! Stratified n-fold cross-validation over a parameter grid.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::KernelChoice;
use super::smo::{smo_train, SmoSettings};
use crate::error::{Error, Result};

/// One point of the hyperparameter grid. `b` and `b_prime` only matter to
/// the CDF pipeline; the plain binary search ignores them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub c: f64,
    pub kernel: KernelChoice,
    pub b: f64,
    pub b_prime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub cell: GridCell,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub best_index: usize,
    pub table: Vec<CvRow>,
}

impl CvResult {
    pub fn best(&self) -> &GridCell {
        &self.table[self.best_index].cell
    }
}

/// Fold id for every sample: each class is shuffled with the seed and dealt
/// round-robin over the folds.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    let num_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut by_class = vec![Vec::new(); num_classes];
    for (k, &c) in labels.iter().enumerate() {
        by_class[c].push(k);
    }
    let min_class = by_class.iter().filter(|v| !v.is_empty()).map(Vec::len).min().unwrap_or(0);
    if folds > min_class {
        return Err(Error::TooManyFolds { folds, min_class });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for (pos, &k) in members.iter().enumerate() {
            assignment[k] = pos % folds;
        }
    }
    Ok(assignment)
}

/// Evaluates every grid cell on every fold with `evaluate(cell, train, validation)`
/// and returns the table with the first best cell. Cells run in parallel;
/// the table is in grid order regardless.
pub fn grid_search<F>(
    labels: &[usize],
    grid: &[GridCell],
    folds: usize,
    seed: u64,
    evaluate: F,
) -> Result<CvResult>
where
    F: Fn(&GridCell, &[usize], &[usize]) -> Result<f64> + Sync,
{
    if grid.is_empty() {
        return Err(Error::Empty("parameter grid"));
    }
    let assignment = stratified_folds(labels, folds, seed)?;
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..folds)
        .map(|f| {
            (0..labels.len()).partition(|&k| assignment[k] != f)
        })
        .collect();
    let table = grid
        .par_iter()
        .map(|cell| {
            let fold_accuracies = splits
                .iter()
                .map(|(train, val)| evaluate(cell, train, val))
                .collect::<Result<Vec<_>>>()?;
            let mean_accuracy = fold_accuracies.iter().sum::<f64>() / folds as f64;
            Ok(CvRow {
                cell: *cell,
                fold_accuracies,
                mean_accuracy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best_index = 0;
    for (k, row) in table.iter().enumerate() {
        if row.mean_accuracy > table[best_index].mean_accuracy {
            best_index = k;
        }
    }
    Ok(CvResult { best_index, table })
}

/// Cross-validates a plain binary SVM on `(x, y)` with `y` in {+1, −1}.
pub fn cross_validate(
    x: &[Vec<f64>],
    y: &[f64],
    grid: &[GridCell],
    folds: usize,
    settings: &SmoSettings,
) -> Result<CvResult> {
    let classes: Vec<usize> = y.iter().map(|&l| usize::from(l < 0.0)).collect();
    grid_search(&classes, grid, folds, settings.seed, |cell, train, val| {
        let tx: Vec<Vec<f64>> = train.iter().map(|&k| x[k].clone()).collect();
        let ty: Vec<f64> = train.iter().map(|&k| y[k]).collect();
        let dim = tx.first().map_or(1, Vec::len);
        let model = smo_train(&tx, &ty, cell.c, cell.kernel.resolve(dim), settings)?;
        let mut correct = 0usize;
        for &k in val {
            let d = model.decision(&x[k])?;
            if (d > 0.0) == (y[k] > 0.0) {
                correct += 1;
            }
        }
        Ok(correct as f64 / val.len() as f64)
    })
}
