use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::SynthConfig;
use crate::error::Result;
use crate::types::BanknoteClassLabel;

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

/// JSON sidecar describing an FVEC file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub n_classes: usize,
    pub dim: usize,
    pub class_names: Vec<String>,
    /// Generator settings for synthetic data; absent for extracted features.
    pub config: Option<SynthConfig>,
    pub seed: Option<u64>,
    pub format_version: u32,
}

impl Manifest {
    pub fn for_synthetic(cfg: &SynthConfig) -> Self {
        Self {
            n_classes: cfg.n_classes,
            dim: cfg.dim,
            class_names: class_names(cfg.n_classes),
            config: Some(cfg.clone()),
            seed: Some(cfg.seed),
            format_version: MANIFEST_FORMAT_VERSION,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Sidecar location for an FVEC file: same stem, `.json` extension.
pub fn manifest_path(fvec: impl AsRef<Path>) -> PathBuf {
    fvec.as_ref().with_extension("json")
}

/// Canonical banknote labels for the 40-class set, generic names otherwise.
pub fn class_names(n_classes: usize) -> Vec<String> {
    if n_classes == BanknoteClassLabel::all().len() {
        BanknoteClassLabel::all()
            .iter()
            .map(|c| c.to_string())
            .collect()
    } else {
        (1..=n_classes).map(|i| format!("class_{i:03}")).collect()
    }
}
