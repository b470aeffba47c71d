//! Run configuration as read from a JSON file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vdw_core::anomaly::AnomalySpec;
use vdw_core::bec::{BoxModel, TrapModel};
use vdw_core::media::ProfileSpec;
use vdw_core::stress_engine::StressSpec;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    pub stress: StressSpec,
    pub anomaly: AnomalySpec,
}

/// Levels tabulated by the `bec-*` commands when none are given.
pub const DEFAULT_LEVELS: [u32; 4] = [1, 2, 4, 8];

fn default_levels() -> Vec<u32> {
    DEFAULT_LEVELS.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub profile: Option<ProfileSpec>,
    #[serde(default)]
    pub numerics: Numerics,
    /// Radii of the `stress`, `pressure` and `abraham-check` sweeps.
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default, rename = "box")]
    pub box_model: Option<BoxModel>,
    #[serde(default)]
    pub trap: Option<TrapModel>,
    #[serde(default = "default_levels")]
    pub levels: Vec<u32>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            profile: None,
            numerics: Numerics::default(),
            radii: Vec::new(),
            box_model: None,
            trap: None,
            levels: default_levels(),
            output: OutputSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The config with every default filled in, without the output block.
    pub fn resolved(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = v.as_object_mut() {
            map.remove("output");
        }
        v
    }

    /// SHA-256 of the compact JSON of [`RunConfig::resolved`].
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.resolved()).expect("config serializes");
        format!("{:x}", Sha256::digest(text.as_bytes()))
    }

    pub fn profile(&self) -> Result<&ProfileSpec, CliError> {
        self.profile.as_ref().ok_or_else(|| CliError::Validation("config needs a 'profile' block".into()))
    }

    pub fn radii(&self) -> Result<&[f64], CliError> {
        if self.radii.is_empty() {
            return Err(CliError::Validation("config needs a non-empty 'radii' list".into()));
        }
        if let Some(r) = self.radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(CliError::Validation(format!("radius {r} must be positive")));
        }
        Ok(&self.radii)
    }

    pub fn validate_output(&self) -> Result<(), CliError> {
        if let Some(path) = &self.output.path {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                if !dir.is_dir() {
                    return Err(CliError::Validation(format!("output directory {} does not exist", dir.display())));
                }
            }
        }
        Ok(())
    }
}
