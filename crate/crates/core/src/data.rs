//! Domain types shared by the whole pipeline.
//!
//! A [`RawDataset`] is what the loaders produce: plain vectors, dense class
//! ids and the side table of original label names. It can hold anything.
//! A [`Dataset`] is a `RawDataset` that passed [`validate_dataset`], and is
//! the only form the training code accepts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{FeatureMode, SelectionMode};
use crate::error::{Error, Result};

/// Dense class-label id in `[0, num_classes)`.
pub type ClassId = usize;

/// Unvalidated samples as produced by the loaders.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RawDataset {
    pub vectors: Vec<Vec<f64>>,
    pub labels: Vec<ClassId>,
    pub num_classes: usize,
    pub dim: usize,
    /// Original label strings, indexed by class id.
    pub label_names: Vec<String>,
}

impl RawDataset {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Re-express the labels against another label table (e.g. a trained
    /// model's), matching on label names.
    pub fn align_labels(&mut self, names: &[String]) -> Result<()> {
        let mapping = self
            .label_names
            .iter()
            .map(|name| {
                names.iter().position(|n| n == name).ok_or_else(|| {
                    Error::Config(format!("label {name:?} is unknown to the model"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for label in &mut self.labels {
            *label = mapping[*label];
        }
        self.label_names = names.to_vec();
        self.num_classes = names.len();
        Ok(())
    }

    /// Keeps only samples whose label name is in `keep`, at most
    /// `per_class` of each in file order. Classes are renumbered in the
    /// order of `keep`.
    pub fn select_classes(&self, keep: &[&str], per_class: Option<usize>) -> Result<RawDataset> {
        let mapping: Vec<Option<usize>> = self
            .label_names
            .iter()
            .map(|n| keep.iter().position(|k| k == n))
            .collect();
        if let Some(missing) = keep.iter().find(|k| !self.label_names.iter().any(|n| n == *k)) {
            return Err(Error::Config(format!("label {missing:?} is not in the dataset")));
        }
        let limit = per_class.unwrap_or(usize::MAX);
        let mut taken = vec![0usize; keep.len()];
        let mut out = RawDataset {
            vectors: Vec::new(),
            labels: Vec::new(),
            num_classes: keep.len(),
            dim: self.dim,
            label_names: keep.iter().map(|k| k.to_string()).collect(),
        };
        for (v, &l) in self.vectors.iter().zip(&self.labels) {
            let Some(new) = mapping.get(l).copied().flatten() else {
                continue;
            };
            if taken[new] < limit {
                taken[new] += 1;
                out.vectors.push(v.clone());
                out.labels.push(new);
            }
        }
        Ok(out)
    }
}

/// One broken [`Dataset`] invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    ZeroDimension,
    ZeroClasses,
    LabelCount { vectors: usize, labels: usize },
    WrongLength { sample: usize, expected: usize, actual: usize },
    BadComponent { sample: usize, index: usize, value: f64 },
    ClassOutOfRange { sample: usize, class: ClassId, num_classes: usize },
    EmptyClass { class: ClassId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDimension => write!(f, "dimension must be positive"),
            Violation::ZeroClasses => write!(f, "number of classes must be positive"),
            Violation::LabelCount { vectors, labels } => {
                write!(f, "{vectors} vectors but {labels} labels")
            }
            Violation::WrongLength {
                sample,
                expected,
                actual,
            } => write!(f, "sample {sample} has length {actual}, expected {expected}"),
            Violation::BadComponent {
                sample,
                index,
                value,
            } => write!(
                f,
                "sample {sample} component {index} is {value} (must be finite and >= 0)"
            ),
            Violation::ClassOutOfRange {
                sample,
                class,
                num_classes,
            } => write!(
                f,
                "sample {sample} has class {class}, outside [0, {num_classes})"
            ),
            Violation::EmptyClass { class } => write!(f, "class {class} has no samples"),
        }
    }
}

/// Per-sample checks only: lengths, component values and label range.
/// Class coverage is not checked, so evaluation sets that lack a class pass.
pub fn validate_samples(d: &RawDataset) -> Vec<Violation> {
    let mut out = Vec::new();
    if d.dim == 0 {
        out.push(Violation::ZeroDimension);
    }
    if d.num_classes == 0 {
        out.push(Violation::ZeroClasses);
    }
    if d.vectors.len() != d.labels.len() {
        out.push(Violation::LabelCount {
            vectors: d.vectors.len(),
            labels: d.labels.len(),
        });
    }
    for (k, v) in d.vectors.iter().enumerate() {
        if v.len() != d.dim {
            out.push(Violation::WrongLength {
                sample: k,
                expected: d.dim,
                actual: v.len(),
            });
        }
        if let Some((i, &x)) = v.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0) {
            out.push(Violation::BadComponent {
                sample: k,
                index: i,
                value: x,
            });
        }
    }
    for (k, &c) in d.labels.iter().enumerate() {
        if c >= d.num_classes {
            out.push(Violation::ClassOutOfRange {
                sample: k,
                class: c,
                num_classes: d.num_classes,
            });
        }
    }
    out
}

/// Every violated [`Dataset`] invariant; empty iff the input is a valid
/// training set.
pub fn validate_dataset(d: &RawDataset) -> Vec<Violation> {
    let mut out = validate_samples(d);
    let mut seen = vec![false; d.num_classes];
    for &c in &d.labels {
        if c < d.num_classes {
            seen[c] = true;
        }
    }
    out.extend(
        seen.iter()
            .enumerate()
            .filter(|(_, s)| !**s)
            .map(|(class, _)| Violation::EmptyClass { class }),
    );
    out
}

/// Validated training samples grouped by class.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    raw: RawDataset,
    class_index: Vec<Vec<usize>>,
}

impl Dataset {
    pub fn new(raw: RawDataset) -> Result<Self> {
        let violations = validate_dataset(&raw);
        if !violations.is_empty() {
            return Err(Error::InvalidDataset(
                violations.iter().map(ToString::to_string).collect(),
            ));
        }
        let mut class_index = vec![Vec::new(); raw.num_classes];
        for (k, &c) in raw.labels.iter().enumerate() {
            class_index[c].push(k);
        }
        Ok(Dataset { raw, class_index })
    }

    /// Builds a dataset from the given sample indices, keeping the label
    /// table. Fails if a class ends up empty.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let raw = RawDataset {
            vectors: indices.iter().map(|&i| self.raw.vectors[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.raw.labels[i]).collect(),
            num_classes: self.raw.num_classes,
            dim: self.raw.dim,
            label_names: self.raw.label_names.clone(),
        };
        Dataset::new(raw)
    }

    pub fn len(&self) -> usize {
        self.raw.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.vectors.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.raw.num_classes
    }

    pub fn dim(&self) -> usize {
        self.raw.dim
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.raw.vectors
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.raw.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.raw.label_names
    }

    /// Sample indices belonging to `class`.
    pub fn class_index(&self, class: ClassId) -> &[usize] {
        &self.class_index[class]
    }

    pub fn class_samples(&self, class: ClassId) -> impl Iterator<Item = &[f64]> + '_ {
        self.class_index[class]
            .iter()
            .map(move |&k| self.raw.vectors[k].as_slice())
    }

    pub fn into_raw(self) -> RawDataset {
        self.raw
    }

    pub fn as_raw(&self) -> &RawDataset {
        &self.raw
    }
}

/// Summed and mean per-class vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassProfile {
    pub class_id: ClassId,
    pub sum_vec: Vec<f64>,
    /// Per-dimension class mean, the class's profile.
    pub mean_vec: Vec<f64>,
    pub cardinality: usize,
}

/// Everything the selection step computed for one unordered class pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairContext {
    pub class_x: ClassId,
    pub class_y: ClassId,
    /// Smoothed per-dimension ratio of the x profile to the y profile.
    pub ratios_xy: Vec<f64>,
    pub mu_xy: f64,
    pub mu_yx: f64,
    pub b: f64,
    pub b_prime: f64,
    pub tau: f64,
    pub tau_prime: f64,
    /// Selected dimensions, strictly increasing and never empty.
    pub mask: Vec<usize>,
    pub selection_mode: SelectionMode,
    pub smoothing_eps: f64,
    /// Set when the threshold rule selected nothing and the single
    /// max-difference dimension was used instead.
    pub fallback: bool,
}

impl PairContext {
    /// Fraction of the input dimensions kept by the mask.
    pub fn retention(&self) -> f64 {
        self.mask.len() as f64 / self.ratios_xy.len() as f64
    }
}

/// Pair features with their ±1 labels, ready for a binary SVM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFeatureSet {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
    pub feature_mode: FeatureMode,
}
