//! Binary soft-margin SVM: kernels, the SMO dual solver and grid search.

mod cache;
pub mod cv;
pub mod kernel;
pub mod smo;

use serde::{Deserialize, Serialize};

pub use cv::{cross_validate, grid_search, stratified_folds, CvResult, CvRow, GridCell};
pub use kernel::{kernel_eval, KernelChoice, KernelKind, KernelSpec};
pub use smo::{decision, smo_train, SmoSettings, SvmModel, TrainingStats};

/// SVM settings shared by every pair of a multiclass model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    pub c: f64,
    pub kernel: KernelChoice,
    pub solver: SmoSettings,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 10.0,
            kernel: KernelChoice::default(),
            solver: SmoSettings::default(),
        }
    }
}
