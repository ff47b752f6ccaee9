//! The trained multiclass model and its JSON document form.
//!
//! The document carries `"format": "cdf-model/1"` and writes every real with
//! 17 significant digits, so a save/load cycle is exact.

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::cdf::RestrictedProfiles;
use crate::config::CdfConfig;
use crate::data::{ClassProfile, PairContext};
use crate::error::{Error, Result};
use crate::svm::{SvmModel, SvmParams};

pub const MODEL_FORMAT: &str = "cdf-model/1";

/// Everything that shaped training.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub cdf: CdfConfig,
    pub svm: SvmParams,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        self.cdf.validate()?;
        if !(self.svm.c > 0.0 && self.svm.c.is_finite()) {
            return Err(Error::Config(format!("C must be positive, got {}", self.svm.c)));
        }
        if !(self.svm.solver.tol > 0.0) {
            return Err(Error::Config("solver tolerance must be positive".into()));
        }
        self.svm.kernel.resolve(1).validate()
    }
}

/// One unordered class pair: its selection context, the restricted class
/// profiles used at predict time, and its classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedPair {
    pub context: PairContext,
    pub profiles: RestrictedProfiles,
    pub svm: SvmModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfModel {
    pub format: String,
    pub config: ModelConfig,
    pub num_classes: usize,
    pub dim: usize,
    pub label_names: Vec<String>,
    /// Term list when the model was trained on bag-of-words text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<Vec<String>>,
    pub profiles: Vec<ClassProfile>,
    /// Pairs `(x, y)` with `x < y`, in lexicographic order.
    pub pairs: Vec<TrainedPair>,
}

impl CdfModel {
    pub fn to_json(&self) -> Result<String> {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits);
        self.serialize(&mut ser)?;
        out.push(b'\n');
        Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("format").and_then(|f| f.as_str()) {
            Some(MODEL_FORMAT) => {}
            Some(other) => {
                return Err(Error::ModelFormat(format!(
                    "unsupported format {other:?}, expected {MODEL_FORMAT:?}"
                )))
            }
            None => return Err(Error::ModelFormat("missing format field".into())),
        }
        let model: CdfModel = serde_json::from_str(text)?;
        model.check()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        })?;
        Self::from_json(&text)
    }

    /// Structural invariants: one pair per unordered class pair, masks
    /// inside the input dimension.
    pub fn check(&self) -> Result<()> {
        let m = self.num_classes;
        if self.pairs.len() != m * (m.saturating_sub(1)) / 2 {
            return Err(Error::ModelFormat(format!(
                "{} pairs stored for {m} classes",
                self.pairs.len()
            )));
        }
        let expected = (0..m).flat_map(|x| (x + 1..m).map(move |y| (x, y)));
        for (pair, (x, y)) in self.pairs.iter().zip(expected) {
            let ctx = &pair.context;
            if (ctx.class_x, ctx.class_y) != (x, y) {
                return Err(Error::ModelFormat(format!(
                    "pair ({}, {}) out of order, expected ({x}, {y})",
                    ctx.class_x, ctx.class_y
                )));
            }
            if ctx.mask.is_empty() || ctx.mask.iter().any(|&i| i >= self.dim) {
                return Err(Error::ModelFormat(format!("pair ({x}, {y}) has an invalid mask")));
            }
        }
        if self.label_names.len() != m {
            return Err(Error::ModelFormat("label table size differs from class count".into()));
        }
        Ok(())
    }

    pub fn pair(&self, x: usize, y: usize) -> Option<&TrainedPair> {
        self.pairs
            .iter()
            .find(|p| p.context.class_x == x && p.context.class_y == y)
    }
}

/// Compact JSON with every float written as `d.dddddddddddddddde±x`.
struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{:.16e}", f64::from(value))
    }
}
