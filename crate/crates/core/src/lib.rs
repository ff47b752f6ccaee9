//! # cdf-core
//!
//! Class-dependent features (CDFs) for pairwise classification.
//!
//! For every pair of classes the pipeline keeps only the input dimensions
//! whose class-mean profiles differ strongly between the two classes, then
//! describes each sample by its Kullback-Leibler divergence from the two
//! restricted profiles. A soft-margin SVM per pair is trained on those
//! features and the pairs vote on the final class.
//!
//! ```
//! use cdf_core::{multiclass, Dataset, ModelConfig, RawDataset};
//!
//! let raw = RawDataset {
//!     vectors: vec![
//!         vec![9.0, 1.0, 1.0], vec![8.0, 1.0, 2.0],
//!         vec![1.0, 9.0, 1.0], vec![1.0, 8.0, 2.0],
//!     ],
//!     labels: vec![0, 0, 1, 1],
//!     num_classes: 2,
//!     dim: 3,
//!     label_names: vec!["left".into(), "right".into()],
//! };
//! let data = Dataset::new(raw)?;
//! let model = multiclass::train(&data, &ModelConfig::default())?;
//! let (class, votes) = multiclass::predict(&model, &[7.0, 2.0, 1.0])?;
//! assert_eq!(class, 0);
//! assert_eq!(votes.votes.iter().sum::<u32>(), 1);
//! # Ok::<(), cdf_core::Error>(())
//! ```
//!
//! The `book/` directory next to this crate walks through each stage.

pub mod baseline;
pub mod cdf;
pub mod config;
pub mod data;
mod error;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod multiclass;
pub mod report;
pub mod svm;

pub use config::{CdfConfig, FeatureMode, Multipliers, SelectionMode};
pub use data::{validate_dataset, ClassId, ClassProfile, Dataset, PairContext, PairFeatureSet, RawDataset, Violation};
pub use error::{Error, Result};
pub use model::{CdfModel, ModelConfig, TrainedPair, MODEL_FORMAT};
pub use multiclass::VoteRecord;
pub use svm::{KernelChoice, KernelKind, KernelSpec, SvmModel, SvmParams};

// The book's snippets compile and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/profiles.md")]
    mod profiles {}
    #[doc = include_str!("../../../book/src/selection.md")]
    mod selection {}
    #[doc = include_str!("../../../book/src/features.md")]
    mod features {}
    #[doc = include_str!("../../../book/src/svm.md")]
    mod svm {}
    #[doc = include_str!("../../../book/src/one_vs_one.md")]
    mod one_vs_one {}
    #[doc = include_str!("../../../book/src/datasets.md")]
    mod datasets {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
