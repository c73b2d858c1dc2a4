//! Internal vs external importance, sized by explained variance, split into
//! quadrants at the two medians.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::importance::{ImportanceRow, ImportanceTable};
use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InternalMetric {
    #[default]
    Mdg,
    Permutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExternalMetric {
    #[default]
    EtaSquared,
    FStatistic,
}

impl InternalMetric {
    pub fn of(self, row: &ImportanceRow) -> f64 {
        match self {
            InternalMetric::Mdg => row.mdg,
            InternalMetric::Permutation => row.permutation_importance,
        }
    }
}

impl ExternalMetric {
    pub fn of(self, row: &ImportanceRow) -> f64 {
        match self {
            ExternalMetric::EtaSquared => row.eta_squared,
            ExternalMetric::FStatistic => row.f_statistic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrant {
    /// High internal and high external importance.
    Critical,
    /// High internal only.
    ModelSpecific,
    /// High external only.
    ExternallyRelevant,
    Minor,
}

impl Quadrant {
    /// A value equal to its median counts as high.
    pub fn classify(internal: f64, external: f64, median_internal: f64, median_external: f64) -> Self {
        match (internal >= median_internal, external >= median_external) {
            (true, true) => Quadrant::Critical,
            (true, false) => Quadrant::ModelSpecific,
            (false, true) => Quadrant::ExternallyRelevant,
            (false, false) => Quadrant::Minor,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Quadrant::Critical => "critical",
            Quadrant::ModelSpecific => "model-specific",
            Quadrant::ExternallyRelevant => "externally-relevant",
            Quadrant::Minor => "minor",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubblePoint {
    pub fpc: usize,
    #[serde(with = "crate::serde_float")]
    pub external: f64,
    pub internal: f64,
    /// Explained variance fraction.
    pub size: f64,
    pub quadrant: Quadrant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubblePlotData {
    pub internal_metric: InternalMetric,
    pub external_metric: ExternalMetric,
    pub points: Vec<BubblePoint>,
    pub median_internal: f64,
    #[serde(with = "crate::serde_float")]
    pub median_external: f64,
}

pub fn bubble_data(
    table: &ImportanceTable,
    internal: InternalMetric,
    external: ExternalMetric,
) -> Result<BubblePlotData> {
    if table.rows.is_empty() {
        return Err(Error::EmptyData);
    }
    let ints: Vec<f64> = table.rows.iter().map(|r| internal.of(r)).collect();
    let exts: Vec<f64> = table.rows.iter().map(|r| external.of(r)).collect();
    let median_internal = math::median(&ints);
    let median_external = math::median(&exts);
    let points = table
        .rows
        .iter()
        .zip(ints.iter().zip(&exts))
        .map(|(row, (&i, &e))| BubblePoint {
            fpc: row.fpc,
            external: e,
            internal: i,
            size: row.explained_variance_fraction,
            quadrant: Quadrant::classify(i, e, median_internal, median_external),
        })
        .collect();
    Ok(BubblePlotData {
        internal_metric: internal,
        external_metric: external,
        points,
        median_internal,
        median_external,
    })
}
