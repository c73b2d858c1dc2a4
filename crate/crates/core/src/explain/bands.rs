//! Single-FPC reconstruction bands stratified by score windows.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{column_range, linspace};
use crate::error::{Error, Result};
use crate::fpca::FpcaModel;
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandWindow {
    pub lower_score: f64,
    pub upper_score: f64,
    /// Pointwise minimum of `μ + v ξ_k` over `v` in the window.
    pub lower: Vec<f64>,
    /// Pointwise maximum.
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionBands {
    pub fpc: usize,
    /// `n_windows + 1` increasing edges over the observed score range.
    pub edges: Vec<f64>,
    pub windows: Vec<BandWindow>,
    pub mean_curve: Vec<f64>,
}

/// Envelope of `{μ + v ξ_k : v ∈ [lo, hi]}`. The family is linear in `v`, so
/// the extremes at every `t` are attained at the endpoints.
pub fn band_envelope(model: &FpcaModel, fpc: usize, lo: f64, hi: f64) -> Result<BandWindow> {
    let a = model.reconstruct_single(fpc, lo, true)?;
    let b = model.reconstruct_single(fpc, hi, true)?;
    let (lower, upper) = a
        .iter()
        .zip(&b)
        .map(|(&x, &y)| if x <= y { (x, y) } else { (y, x) })
        .unzip();
    Ok(BandWindow {
        lower_score: lo,
        upper_score: hi,
        lower,
        upper,
    })
}

/// Splits the observed range of FPC `fpc` into `n_windows` equal-width
/// intervals and computes each interval's envelope.
pub fn reconstruction_bands(
    model: &FpcaModel,
    scores: &Matrix,
    fpc: usize,
    n_windows: usize,
) -> Result<ReconstructionBands> {
    if n_windows < 2 {
        return Err(Error::InvalidConfig("need at least 2 score windows"));
    }
    if scores.rows() == 0 {
        return Err(Error::EmptyData);
    }
    if fpc >= model.n_components() || fpc >= scores.cols() {
        return Err(Error::IndexOutOfRange {
            index: fpc,
            limit: model.n_components().min(scores.cols()),
        });
    }
    let (lo, hi) = column_range(scores, fpc);
    if !(hi > lo) {
        return Err(Error::DegenerateScores { fpc });
    }
    let edges = linspace(lo, hi, n_windows + 1);
    let windows = edges
        .windows(2)
        .map(|w| band_envelope(model, fpc, w[0], w[1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReconstructionBands {
        fpc,
        edges,
        windows,
        mean_curve: model.mean_curve.clone(),
    })
}
