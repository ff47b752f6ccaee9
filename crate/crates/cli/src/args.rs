use std::path::PathBuf;

use cdf_core::{FeatureMode, KernelKind, SelectionMode};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{Format, Split};

#[derive(Debug, Parser)]
#[command(name = "cdf", version, about = "Class-dependent features with pairwise SVMs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model, optionally choosing C, b and b' by cross-validation.
    Train(CommonArgs),
    /// Score a model on a labelled dataset.
    Eval(CommonArgs),
    /// Print one prediction per sample.
    Predict(CommonArgs),
    /// Summarize the per-pair feature selection of a model.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Also list every pair's retained input dimensions.
    #[arg(long)]
    pub dump_masks: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Settings shared by the data-reading commands. Flags override the config
/// file, which overrides the built-in defaults.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML file with `[data]`, `[cdf]`, `[svm]` and `[cv]` tables.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// IDX image file.
    #[arg(long)]
    pub images: Option<PathBuf>,
    /// IDX label file.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Sparse text file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Directory holding `reut2-*.sgm`.
    #[arg(long)]
    pub sgml_dir: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Keep only these labels (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub classes: Option<Vec<String>>,
    /// At most this many samples per kept label, in file order.
    #[arg(long)]
    pub per_class: Option<usize>,
    #[arg(long, value_enum)]
    pub split: Option<Split>,
    #[arg(long)]
    pub min_df: Option<usize>,
    #[arg(long)]
    pub top_topics: Option<usize>,

    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub b_prime: Option<f64>,
    #[arg(long, value_enum)]
    pub selection_mode: Option<SelectionArg>,
    #[arg(long, value_enum)]
    pub feature_mode: Option<FeatureArg>,

    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub coef0: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,

    /// Cross-validation folds; fewer than 2 trains with the fixed parameters.
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub jobs: Option<usize>,

    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Report (or prediction) destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SelectionArg {
    Ratio,
    Literal,
}

impl From<SelectionArg> for SelectionMode {
    fn from(a: SelectionArg) -> Self {
        match a {
            SelectionArg::Ratio => SelectionMode::Ratio,
            SelectionArg::Literal => SelectionMode::Literal,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FeatureArg {
    DualKl,
    ScalarKl,
    ElementwiseKl,
}

impl From<FeatureArg> for FeatureMode {
    fn from(a: FeatureArg) -> Self {
        match a {
            FeatureArg::DualKl => FeatureMode::DualKl,
            FeatureArg::ScalarKl => FeatureMode::ScalarKl,
            FeatureArg::ElementwiseKl => FeatureMode::ElementwiseKl,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KernelArg {
    Linear,
    Poly,
    Rbf,
}

impl From<KernelArg> for KernelKind {
    fn from(a: KernelArg) -> Self {
        match a {
            KernelArg::Linear => KernelKind::Linear,
            KernelArg::Poly => KernelKind::Polynomial,
            KernelArg::Rbf => KernelKind::Rbf,
        }
    }
}
