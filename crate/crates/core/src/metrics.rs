//! Error rate, confusion matrix and macro/micro-averaged F1.

use serde::{Deserialize, Serialize};

use crate::data::ClassId;
use crate::error::{Error, Result};

fn check_pair(preds: &[ClassId], truth: &[ClassId]) -> Result<()> {
    if preds.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            actual: preds.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::Empty("prediction list"));
    }
    Ok(())
}

/// Fraction of positions where `preds` and `truth` differ.
pub fn error_rate(preds: &[ClassId], truth: &[ClassId]) -> Result<f64> {
    check_pair(preds, truth)?;
    let wrong = preds.iter().zip(truth).filter(|(p, t)| p != t).count();
    Ok(wrong as f64 / preds.len() as f64)
}

/// Counts indexed `[true][predicted]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
    pub total: u64,
}

impl ConfusionMatrix {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let m = counts.len();
        if counts.iter().any(|row| row.len() != m) {
            return Err(Error::Config("confusion matrix must be square".into()));
        }
        let total = counts.iter().flatten().sum();
        Ok(ConfusionMatrix { counts, total })
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn trace(&self) -> u64 {
        (0..self.num_classes()).map(|c| self.counts[c][c]).sum()
    }
}

pub fn confusion(preds: &[ClassId], truth: &[ClassId], num_classes: usize) -> Result<ConfusionMatrix> {
    if preds.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            actual: preds.len(),
        });
    }
    let mut counts = vec![vec![0u64; num_classes]; num_classes];
    for (&p, &t) in preds.iter().zip(truth) {
        for class in [p, t] {
            if class >= num_classes {
                return Err(Error::ClassOutOfRange { class, num_classes });
            }
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix {
        counts,
        total: preds.len() as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FScores {
    /// Mean of the per-class F1 values.
    pub macro_f: f64,
    /// F1 of the pooled true/false positive and negative counts.
    pub micro_f: f64,
    pub per_class: Vec<ClassScores>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Per-class and averaged F scores. Empty denominators count as zero.
pub fn macro_micro_f(cm: &ConfusionMatrix) -> Result<FScores> {
    let m = cm.num_classes();
    if m == 0 || cm.total == 0 {
        return Err(Error::Empty("confusion matrix"));
    }
    let mut per_class = Vec::with_capacity(m);
    let (mut tp_all, mut fp_all, mut fn_all) = (0u64, 0u64, 0u64);
    for c in 0..m {
        let tp = cm.counts[c][c];
        let predicted: u64 = (0..m).map(|t| cm.counts[t][c]).sum();
        let actual: u64 = cm.counts[c].iter().sum();
        let (fp, fn_) = (predicted - tp, actual - tp);
        tp_all += tp;
        fp_all += fp;
        fn_all += fn_;
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        per_class.push(ClassScores {
            precision,
            recall,
            f1: f1(precision, recall),
        });
    }
    let macro_f = per_class.iter().map(|s| s.f1).sum::<f64>() / m as f64;
    // Micro F1 is 2tp / (2tp + fp + fn). Written as one minus the missed
    // share, it reduces to exactly `1 - error_rate` for single-label data.
    let micro_f = 1.0 - ratio(fp_all + fn_all, 2 * tp_all + fp_all + fn_all);
    Ok(FScores {
        macro_f,
        micro_f,
        per_class,
    })
}
