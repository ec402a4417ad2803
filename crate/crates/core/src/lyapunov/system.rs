use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

/// The mode matrices `A₁..A_M` of `x(t+1) = A_σ(t) x(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchingSystem {
    dim: usize,
    matrices: Vec<SquareMatrix>,
}

impl SwitchingSystem {
    pub fn new(matrices: Vec<SquareMatrix>) -> Result<Self> {
        let dim = matrices
            .first()
            .map(SquareMatrix::dim)
            .ok_or_else(|| Error::InvalidArgument("a system needs at least one mode".into()))?;
        if let Some(m) = matrices.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.dim(),
            });
        }
        Ok(SwitchingSystem { dim, matrices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_modes(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[SquareMatrix] {
        &self.matrices
    }

    /// Matrix of a 1-based mode label.
    pub fn mode(&self, label: usize) -> Result<&SquareMatrix> {
        if label == 0 || label > self.matrices.len() {
            return Err(Error::InvalidLabel {
                label,
                max: self.matrices.len(),
            });
        }
        Ok(&self.matrices[label - 1])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SwitchingSystem {
            dim: self.dim,
            matrices: self.matrices.iter().map(|m| m.scaled(factor)).collect(),
        }
    }

    /// Modes in reverse order.
    pub fn swapped(&self) -> Self {
        let mut matrices = self.matrices.clone();
        matrices.reverse();
        SwitchingSystem {
            dim: self.dim,
            matrices,
        }
    }

    pub fn max_spectral_norm(&self) -> f64 {
        self.matrices
            .iter()
            .map(SquareMatrix::spectral_norm)
            .fold(0.0, f64::max)
    }

    /// Largest spectral radius among the individual modes; a lower bound on
    /// the joint spectral radius.
    pub fn max_spectral_radius(&self) -> f64 {
        self.matrices
            .iter()
            .map(SquareMatrix::spectral_radius)
            .fold(0.0, f64::max)
    }
}

/// Multiplier applied to every matrix of a matrix-set file: either a JSON
/// number or a string such as `"1/1.4"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scale {
    Value(f64),
    Expr(String),
}

impl Scale {
    pub fn value(&self) -> Result<f64> {
        match self {
            Scale::Value(v) => Ok(*v),
            Scale::Expr(s) => {
                let parse = |t: &str| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Format(format!("invalid scale `{s}`")))
                };
                let v = match s.split_once('/') {
                    Some((num, den)) => parse(num)? / parse(den)?,
                    None => parse(s)?,
                };
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Format(format!("invalid scale `{s}`")))
                }
            }
        }
    }
}

/// On-disk matrix set: `{"dim": n, "matrices": [[row-major], ...], "scale": α}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSetFile {
    pub dim: usize,
    pub matrices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
}

impl MatrixSetFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }

    /// The system with the scale already applied.
    pub fn to_system(&self) -> Result<SwitchingSystem> {
        let alpha = self
            .scale
            .as_ref()
            .map(Scale::value)
            .transpose()?
            .unwrap_or(1.0);
        let matrices = self
            .matrices
            .iter()
            .map(|m| SquareMatrix::new(self.dim, m.clone()).map(|a| a.scaled(alpha)))
            .collect::<Result<Vec<_>>>()?;
        SwitchingSystem::new(matrices)
    }
}

impl SwitchingSystem {
    pub fn from_json(text: &str) -> Result<Self> {
        MatrixSetFile::from_json(text)?.to_system()
    }

    /// Matrix-set file without a scale field.
    pub fn to_file(&self) -> MatrixSetFile {
        MatrixSetFile {
            dim: self.dim,
            matrices: self
                .matrices
                .iter()
                .map(|m| m.as_slice().to_vec())
                .collect(),
            scale: None,
        }
    }
}
