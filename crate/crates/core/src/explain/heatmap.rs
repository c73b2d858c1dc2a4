//! FPC probability heatmap: one prediction per (FPC, score) cell with every
//! other coordinate fixed at its column mean.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{column_range, linspace};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::Predictor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapGrid {
    /// Zero-based FPC indices, one heatmap column each.
    pub fpcs: Vec<usize>,
    /// Score values per FPC, `[ν_min, ν_max]` of the observed column.
    pub score_grids: Vec<Vec<f64>>,
    /// `probabilities[c][m]` is the class-1 probability at `score_grids[c][m]`.
    pub probabilities: Vec<Vec<f64>>,
    /// Column means every cell starts from.
    pub reference_row: Vec<f64>,
}

pub fn compute_fpcph<P: Predictor + ?Sized>(
    model: &P,
    scores: &Matrix,
    fpcs: &[usize],
    grid_size: usize,
) -> Result<HeatmapGrid> {
    let n = scores.rows();
    if n == 0 {
        return Err(Error::EmptyData);
    }
    if grid_size < 2 {
        return Err(Error::InvalidConfig("heatmap needs at least 2 grid points"));
    }
    if let Some(&bad) = fpcs.iter().find(|&&k| k >= scores.cols()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            limit: scores.cols(),
        });
    }
    let mut reference_row = alloc::vec![0.0; scores.cols()];
    for row in scores.row_iter() {
        for (m, v) in reference_row.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut reference_row {
        *m /= n as f64;
    }

    let mut score_grids = Vec::with_capacity(fpcs.len());
    let mut probabilities = Vec::with_capacity(fpcs.len());
    let mut row = reference_row.clone();
    for &k in fpcs {
        let (lo, hi) = column_range(scores, k);
        let grid = linspace(lo, hi, grid_size);
        let probs = grid
            .iter()
            .map(|&v| {
                row[k] = v;
                model.predict_proba(&row)
            })
            .collect();
        row[k] = reference_row[k];
        score_grids.push(grid);
        probabilities.push(probs);
    }
    Ok(HeatmapGrid {
        fpcs: fpcs.to_vec(),
        score_grids,
        probabilities,
        reference_row,
    })
}
