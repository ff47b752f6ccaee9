use serde::{Deserialize, Serialize};

use crate::data::ClassId;
use crate::error::{Error, Result};

/// How a dimension qualifies for a pair's mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Per-dimension profile ratio compared with the thresholds.
    #[default]
    Ratio,
    /// Raw profile values compared with the thresholds.
    Literal,
}

/// What the extraction step emits per sample.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    /// Divergence to both class profiles.
    #[default]
    DualKl,
    /// Divergence to the x profile only.
    ScalarKl,
    /// The individual divergence terms, one per masked dimension.
    ElementwiseKl,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Natural,
}

/// Threshold multipliers for one pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    pub b: f64,
    pub b_prime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairOverride {
    pub x: ClassId,
    pub y: ClassId,
    pub b: f64,
    pub b_prime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CdfConfig {
    pub b: f64,
    pub b_prime: f64,
    pub selection_mode: SelectionMode,
    pub feature_mode: FeatureMode,
    pub smoothing_eps: f64,
    pub kl_log_base: LogBase,
    pub pair_overrides: Vec<PairOverride>,
}

impl Default for CdfConfig {
    fn default() -> Self {
        CdfConfig {
            b: 1.0,
            b_prime: 1.0,
            selection_mode: SelectionMode::Ratio,
            feature_mode: FeatureMode::DualKl,
            smoothing_eps: 1e-9,
            kl_log_base: LogBase::Natural,
            pair_overrides: Vec::new(),
        }
    }
}

impl CdfConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("b", self.b)?;
        positive("b_prime", self.b_prime)?;
        positive("smoothing_eps", self.smoothing_eps)?;
        for o in &self.pair_overrides {
            positive("override b", o.b)?;
            positive("override b_prime", o.b_prime)?;
        }
        Ok(())
    }

    /// Multipliers for the pair `(x, y)`, honouring per-pair overrides in
    /// either orientation.
    pub fn multipliers_for(&self, x: ClassId, y: ClassId) -> Multipliers {
        for o in &self.pair_overrides {
            if o.x == x && o.y == y {
                return Multipliers { b: o.b, b_prime: o.b_prime };
            }
            if o.x == y && o.y == x {
                return Multipliers { b: o.b_prime, b_prime: o.b };
            }
        }
        Multipliers {
            b: self.b,
            b_prime: self.b_prime,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_multipliers() {
        let cfg = CdfConfig {
            b: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        assert!(CdfConfig::default().validate().is_ok());
    }

    #[test]
    fn overrides_apply_in_both_orientations() {
        let cfg = CdfConfig {
            pair_overrides: vec![PairOverride { x: 0, y: 2, b: 2.0, b_prime: 3.0 }],
            ..Default::default()
        };
        assert_eq!(cfg.multipliers_for(0, 2), Multipliers { b: 2.0, b_prime: 3.0 });
        assert_eq!(cfg.multipliers_for(2, 0), Multipliers { b: 3.0, b_prime: 2.0 });
        assert_eq!(cfg.multipliers_for(0, 1), Multipliers { b: 1.0, b_prime: 1.0 });
    }
}
