//! Versioned JSON model files.
//!
//! A model file holds everything `predict` needs to go from a raw UCR row to
//! a class probability: the smoothing configuration, the grid, the fitted
//! FPCA, the forest, and the label mapping.

use std::fs;
use std::path::Path;

use frfx_core::{build_basis, smooth, FpcaModel, FunctionalDataset, FunctionalRandomForest, Matrix};
use serde::{Deserialize, Serialize};

use crate::error::{io_at, IoError, Result};
use crate::ucr::LabelMap;

pub const SCHEMA_NAME: &str = "frfx-model";
pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    pub n_basis: usize,
    pub order: usize,
    pub penalty: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            n_basis: 20,
            order: 4,
            penalty: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema: String,
    pub version: u64,
    pub smoothing: SmoothingConfig,
    pub labels: LabelMap,
    /// Labels of the training rows, in the order of `fpca.scores`.
    pub train_labels: Vec<u8>,
    pub fpca: FpcaModel,
    pub forest: FunctionalRandomForest,
}

impl ModelFile {
    pub fn new(
        smoothing: SmoothingConfig,
        labels: LabelMap,
        train_labels: Vec<u8>,
        fpca: FpcaModel,
        forest: FunctionalRandomForest,
    ) -> Self {
        Self {
            schema: SCHEMA_NAME.to_owned(),
            version: SCHEMA_VERSION,
            smoothing,
            labels,
            train_labels,
            fpca,
            forest,
        }
    }

    /// Smooths raw curves with the stored configuration and projects them.
    pub fn scores_for(&self, data: &FunctionalDataset) -> Result<Matrix> {
        let basis = build_basis(data.grid(), self.smoothing.n_basis, self.smoothing.order)?;
        let smoothed = smooth(data, &basis, self.smoothing.penalty)?;
        Ok(self.fpca.project(&smoothed)?)
    }
}

pub fn to_json(model: &ModelFile) -> Result<String> {
    Ok(serde_json::to_string(model)?)
}

pub fn from_json(text: &str) -> Result<ModelFile> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| IoError::CorruptModel(e.to_string()))?;
    if value.get("schema").and_then(|s| s.as_str()) != Some(SCHEMA_NAME) {
        return Err(IoError::CorruptModel("missing or unknown schema name".into()));
    }
    let version = value
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| IoError::CorruptModel("missing version".into()))?;
    if version != SCHEMA_VERSION {
        return Err(IoError::SchemaVersionMismatch {
            found: version,
            expected: SCHEMA_VERSION,
        });
    }
    serde_json::from_value(value).map_err(|e| IoError::CorruptModel(e.to_string()))
}

pub fn save_model(model: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json(model)?).map_err(io_at(path))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    from_json(&fs::read_to_string(path).map_err(io_at(path))?)
}
