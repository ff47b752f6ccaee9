//! TF-IDF weighting, the comparison baseline for text data.
//!
//! `idf[t] = ln((1 + D) / (1 + df_t)) + 1` over the `D` training vectors,
//! and each transformed vector is `count[t] * idf[t]`, L2-normalized.
//! Classification uses [`PairwiseSvm`](crate::multiclass::PairwiseSvm) on the
//! weighted vectors, so the comparison with the CDF pipeline shares the SVM
//! stack.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    pub idf: Vec<f64>,
    pub vocab_size: usize,
    pub doc_count: usize,
}

pub fn fit_idf(train_vectors: &[Vec<f64>]) -> Result<TfIdfModel> {
    let first = train_vectors.first().ok_or(Error::Empty("training corpus"))?;
    let vocab_size = first.len();
    let mut df = vec![0usize; vocab_size];
    for v in train_vectors {
        if v.len() != vocab_size {
            return Err(Error::LengthMismatch {
                expected: vocab_size,
                actual: v.len(),
            });
        }
        for (d, &c) in df.iter_mut().zip(v) {
            if c > 0.0 {
                *d += 1;
            }
        }
    }
    let docs = train_vectors.len() as f64;
    let idf = df
        .iter()
        .map(|&d| ((1.0 + docs) / (1.0 + d as f64)).ln() + 1.0)
        .collect();
    Ok(TfIdfModel {
        idf,
        vocab_size,
        doc_count: train_vectors.len(),
    })
}

impl TfIdfModel {
    pub fn transform_one(&self, counts: &[f64]) -> Result<Vec<f64>> {
        if counts.len() != self.vocab_size {
            return Err(Error::LengthMismatch {
                expected: self.vocab_size,
                actual: counts.len(),
            });
        }
        let mut w: Vec<f64> = counts.iter().zip(&self.idf).map(|(c, i)| c * i).collect();
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            w.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(w)
    }
}

pub fn transform(model: &TfIdfModel, vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    vectors.iter().map(|v| model.transform_one(v)).collect()
}
