use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Linear,
    Polynomial,
    Rbf,
}

/// A fully resolved kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub degree: u32,
    pub gamma: f64,
    pub coef0: f64,
}

impl KernelSpec {
    pub fn linear() -> Self {
        KernelSpec {
            kind: KernelKind::Linear,
            degree: 1,
            gamma: 1.0,
            coef0: 0.0,
        }
    }

    pub fn polynomial(degree: u32, gamma: f64, coef0: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Polynomial,
            degree,
            gamma,
            coef0,
        }
    }

    pub fn rbf(gamma: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Rbf,
            degree: 1,
            gamma,
            coef0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            KernelKind::Linear => Ok(()),
            KernelKind::Polynomial if self.degree < 1 => {
                Err(Error::Config("polynomial kernel needs degree >= 1".into()))
            }
            KernelKind::Polynomial | KernelKind::Rbf if !(self.gamma > 0.0 && self.gamma.is_finite()) => {
                Err(Error::Config(format!("kernel gamma must be positive, got {}", self.gamma)))
            }
            _ => Ok(()),
        }
    }

    /// Kernel value without a length check.
    #[inline]
    pub fn eval_unchecked(&self, u: &[f64], v: &[f64]) -> f64 {
        match self.kind {
            KernelKind::Linear => dot(u, v),
            KernelKind::Polynomial => (self.gamma * dot(u, v) + self.coef0).powi(self.degree as i32),
            KernelKind::Rbf => {
                let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                (-self.gamma * d2).exp()
            }
        }
    }
}

/// Kernel as configured, before the feature dimension is known.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelChoice {
    pub kind: KernelKind,
    pub degree: u32,
    /// `None` resolves to `1 / feature_dim`.
    pub gamma: Option<f64>,
    pub coef0: f64,
}

impl Default for KernelChoice {
    fn default() -> Self {
        KernelChoice {
            kind: KernelKind::Polynomial,
            degree: 2,
            gamma: None,
            coef0: 1.0,
        }
    }
}

impl KernelChoice {
    pub fn resolve(&self, feature_dim: usize) -> KernelSpec {
        KernelSpec {
            kind: self.kind,
            degree: self.degree,
            gamma: self.gamma.unwrap_or(1.0 / feature_dim.max(1) as f64),
            coef0: self.coef0,
        }
    }
}

#[inline]
fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn kernel_eval(spec: &KernelSpec, u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    Ok(spec.eval_unchecked(u, v))
}
