//! Run configuration: built-in defaults, then the TOML file, then flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cdf_core::svm::GridCell;
use cdf_core::{CdfConfig, FeatureMode, KernelKind, ModelConfig, SelectionMode, SvmParams};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::CommonArgs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Idx,
    Sparse,
    Reuters,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSpec {
    pub format: Option<Format>,
    pub images: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub sgml_dir: Option<PathBuf>,
    /// Sparse input dimension; inferred from the largest index when unset.
    pub dim: Option<usize>,
    /// Keep only these labels, in this order.
    pub classes: Vec<String>,
    pub per_class: Option<usize>,
    /// Reuters split to read; `train` for training, `test` otherwise.
    pub split: Option<Split>,
    pub min_df: Option<usize>,
    pub top_topics: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvSpec {
    /// Cross-validation is skipped below 2 folds.
    pub folds: usize,
    pub c_grid: Vec<f64>,
    pub b_grid: Vec<f64>,
    pub b_prime_grid: Vec<f64>,
}

impl Default for CvSpec {
    fn default() -> Self {
        CvSpec {
            folds: 0,
            c_grid: vec![0.1, 1.0, 10.0, 100.0],
            b_grid: vec![0.5, 1.0, 1.5, 2.0],
            b_prime_grid: vec![0.5, 1.0, 1.5, 2.0],
        }
    }
}

/// The fully resolved settings of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataSpec,
    pub cdf: CdfConfig,
    pub svm: SvmParams,
    pub cv: CvSpec,
    /// Worker threads; 0 lets the thread pool decide.
    pub jobs: usize,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let mut cfg = match &args.config {
            Some(path) => Self::from_file(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(args);
        cfg.model_config().validate()?;
        Ok(cfg)
    }

    fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        // Paths in the file are relative to the file.
        let base = path.parent().unwrap_or(Path::new(""));
        let d = &mut cfg.data;
        for p in [&mut d.images, &mut d.labels, &mut d.data, &mut d.sgml_dir].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    fn apply(&mut self, a: &CommonArgs) {
        let d = &mut self.data;
        set(&mut d.format, a.format);
        set(&mut d.images, a.images.clone());
        set(&mut d.labels, a.labels.clone());
        set(&mut d.data, a.data.clone());
        set(&mut d.sgml_dir, a.sgml_dir.clone());
        set(&mut d.dim, a.dim);
        set(&mut d.per_class, a.per_class);
        set(&mut d.split, a.split);
        set(&mut d.min_df, a.min_df);
        set(&mut d.top_topics, a.top_topics);
        if let Some(c) = &a.classes {
            d.classes = c.clone();
        }

        let c = &mut self.cdf;
        assign(&mut c.b, a.b);
        assign(&mut c.b_prime, a.b_prime);
        assign(&mut c.selection_mode, a.selection_mode.map(SelectionMode::from));
        assign(&mut c.feature_mode, a.feature_mode.map(FeatureMode::from));

        let s = &mut self.svm;
        assign(&mut s.c, a.c);
        assign(&mut s.kernel.kind, a.kernel.map(KernelKind::from));
        assign(&mut s.kernel.degree, a.degree);
        assign(&mut s.kernel.coef0, a.coef0);
        if a.gamma.is_some() {
            s.kernel.gamma = a.gamma;
        }
        assign(&mut s.solver.tol, a.tol);
        assign(&mut s.solver.seed, a.seed);

        assign(&mut self.cv.folds, a.folds);
        assign(&mut self.jobs, a.jobs);
    }

    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            cdf: self.cdf.clone(),
            svm: self.svm.clone(),
        }
    }

    /// Every `(C, b, b')` combination, kernel fixed, in `C`-major order.
    pub fn grid(&self) -> Result<Vec<GridCell>> {
        let cv = &self.cv;
        if cv.c_grid.is_empty() || cv.b_grid.is_empty() || cv.b_prime_grid.is_empty() {
            bail!("cross-validation grids must not be empty");
        }
        let mut cells = Vec::new();
        for &c in &cv.c_grid {
            for &b in &cv.b_grid {
                for &b_prime in &cv.b_prime_grid {
                    cells.push(GridCell {
                        c,
                        kernel: self.svm.kernel,
                        b,
                        b_prime,
                    });
                }
            }
        }
        Ok(cells)
    }

    /// `config.`-prefixed `key=value` pairs for every resolved setting,
    /// keys sorted.
    pub fn echo(&self) -> Result<Vec<(String, String)>> {
        let value = serde_json::to_value(self).context("cannot serialize config")?;
        let mut out = Vec::new();
        flatten("config", &value, &mut out);
        Ok(out)
    }
}

fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

fn assign<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{prefix}.{k}"), v, out);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object() || v.is_array()) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, out);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push((prefix.to_string(), parts.join(",")));
        }
        v => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".to_string(),
        other => other.to_string(),
    }
}
