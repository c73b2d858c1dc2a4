//! Functional partial dependence: the average prediction as one FPC score
//! sweeps a grid while every other score keeps its observed value.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{column_range, linspace};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::Predictor;

/// Probabilities are clamped into `[LOGIT_CLAMP, 1 − LOGIT_CLAMP]` before
/// taking log-odds.
pub const LOGIT_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PdpScale {
    #[default]
    Probability,
    Logit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdpCurve {
    /// Zero-based FPC index.
    pub fpc: usize,
    pub score_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub scale: PdpScale,
}

pub fn logit(p: f64) -> f64 {
    let p = p.clamp(LOGIT_CLAMP, 1.0 - LOGIT_CLAMP);
    math::ln(p / (1.0 - p))
}

/// FPDP of column `fpc` over `grid_size` equispaced values spanning its
/// observed range.
///
/// For each grid value the rows are visited in order, the prediction for the
/// modified row is accumulated, and the sum is divided by `N`.
pub fn compute_fpdp<P: Predictor + ?Sized>(
    model: &P,
    scores: &Matrix,
    fpc: usize,
    grid_size: usize,
    scale: PdpScale,
) -> Result<PdpCurve> {
    let n = scores.rows();
    if n == 0 {
        return Err(Error::EmptyData);
    }
    if fpc >= scores.cols() {
        return Err(Error::IndexOutOfRange {
            index: fpc,
            limit: scores.cols(),
        });
    }
    if grid_size < 2 {
        return Err(Error::InvalidConfig("partial dependence needs at least 2 grid points"));
    }
    let (lo, hi) = column_range(scores, fpc);
    let score_grid = linspace(lo, hi, grid_size);
    let mut row = Vec::with_capacity(scores.cols());
    let values = score_grid
        .iter()
        .map(|&v| {
            let mut acc = 0.0;
            for i in 0..n {
                row.clear();
                row.extend_from_slice(scores.row(i));
                row[fpc] = v;
                acc += model.predict_proba(&row);
            }
            let p = acc / n as f64;
            match scale {
                PdpScale::Probability => p,
                PdpScale::Logit => logit(p),
            }
        })
        .collect();
    Ok(PdpCurve {
        fpc,
        score_grid,
        values,
        scale,
    })
}
