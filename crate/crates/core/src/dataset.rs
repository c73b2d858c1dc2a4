use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::Matrix;

/// Discretely observed curves: one row of `values` per curve, one column per
/// grid point, with optional binary labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalDataset {
    grid: TimeGrid,
    values: Matrix,
    labels: Option<Vec<u8>>,
}

impl FunctionalDataset {
    pub fn new(grid: TimeGrid, values: Matrix, labels: Option<Vec<u8>>) -> Result<Self> {
        if values.rows() == 0 {
            return Err(Error::EmptyData);
        }
        if values.cols() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.cols(),
            });
        }
        if values.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite observation"));
        }
        if let Some(l) = &labels {
            if l.len() != values.rows() {
                return Err(Error::DimensionMismatch {
                    expected: values.rows(),
                    found: l.len(),
                });
            }
            if l.iter().any(|&y| y > 1) {
                return Err(Error::InvalidDataset("labels must be 0 or 1"));
            }
        }
        Ok(Self {
            grid,
            values,
            labels,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.rows() == 0
    }

    /// Keeps the rows at `indices` (in that order).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                limit: self.len(),
            });
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect());
        Self::new(self.grid.clone(), self.values.select_rows(indices), labels)
    }
}
