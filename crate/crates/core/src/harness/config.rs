use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::estimators::{MeasureSpec, PaddingPolicy, ScaleFunction};
use crate::geometry::{derive_constants, ModelParams};

use super::HarnessError;

/// Full experiment configuration; serialized verbatim into every output
/// for provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: usize,
    pub alpha: f64,
    pub psi_kind: ScaleFunction,
    pub kappa3: f64,
    pub k: u32,
    pub n_grid: Vec<u64>,
    pub replicates: u64,
    pub master_seed: u64,
    pub intensity: f64,
    pub padding_policy: PaddingPolicy,
    pub lambda_count: usize,
    pub grid_resolution: usize,
    pub output_dir: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            d: 2,
            alpha: 1.5,
            psi_kind: ScaleFunction::Sqrt,
            kappa3: 0.4,
            k: 1,
            n_grid: vec![16, 32, 64],
            replicates: 50,
            master_seed: 1,
            intensity: 1.0,
            padding_policy: PaddingPolicy::default(),
            lambda_count: 5,
            grid_resolution: 2,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Validate and derive the model parameters.
    pub fn params(&self) -> Result<ModelParams, HarnessError> {
        let params = derive_constants(self.d, self.alpha, self.kappa3)
            .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        if self.n_grid.is_empty() {
            return Err(HarnessError::InvalidConfig("n_grid is empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::InvalidConfig(
                "n_grid must be strictly increasing".into(),
            ));
        }
        if self.n_grid.iter().any(|&n| n == 0) {
            return Err(HarnessError::InvalidConfig("n_grid contains 0".into()));
        }
        if self.replicates == 0 {
            return Err(HarnessError::InvalidConfig(
                "replicates must be >= 1".into(),
            ));
        }
        if !(self.intensity > 0.0) || !self.intensity.is_finite() {
            return Err(HarnessError::InvalidConfig(format!(
                "intensity must be positive, got {}",
                self.intensity
            )));
        }
        if self.k == 0 {
            return Err(HarnessError::InvalidConfig("k must be >= 1".into()));
        }
        Ok(params)
    }

    pub fn measure_spec(&self) -> Result<MeasureSpec, HarnessError> {
        let params = self.params()?;
        Ok(MeasureSpec {
            params,
            psi: self.psi_kind.clone(),
            k: self.k,
            intensity: self.intensity,
            padding: self.padding_policy,
            lambda_count: self.lambda_count,
            direction: None,
        })
    }

    /// Stable 64-bit hash of the canonical JSON serialization, embedded
    /// into every output file so reports can refuse mixed inputs.
    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    let canonical = serde_json::to_string(&CanonicalView(config)).expect("config serializes");
    format!("{:016x}", fnv1a(canonical.as_bytes()))
}

/// The hash covers everything that affects the records, but not where
/// they are written.
struct CanonicalView<'a>(&'a ExperimentConfig);

impl Serialize for CanonicalView<'_> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut c = self.0.clone();
        c.output_dir = None;
        c.serialize(serializer)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}
