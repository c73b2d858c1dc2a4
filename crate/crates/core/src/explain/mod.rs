//! Explainability artifacts for a forest trained on FPC scores.
//!
//! Internal (model-specific) measures read the forest: partial dependence,
//! the probability heatmap, mean decrease in impurity and permutation
//! importance. External (model-agnostic) measures read only scores and labels:
//! class-conditional distributions and one-way ANOVA. [`bubble`] puts one of
//! each side by side with explained variance.

pub mod anova;
pub mod bands;
pub mod bubble;
pub mod heatmap;
pub mod importance;
pub mod pdp;
pub mod violin;

pub use anova::{anova_fpc, AnovaRow};
pub use bands::{reconstruction_bands, BandWindow, ReconstructionBands};
pub use bubble::{bubble_data, BubblePlotData, BubblePoint, ExternalMetric, InternalMetric, Quadrant};
pub use heatmap::{compute_fpcph, HeatmapGrid};
pub use importance::{
    importance_table, mdg_importance, permutation_importance, permutation_importance_oob,
    ImportanceRow, ImportanceTable, MdgWeighting, PermutationImportance,
};
pub use pdp::{compute_fpdp, logit, PdpCurve, PdpScale};
pub use violin::{scores_by_class, ClassConditionalScores, ClassDistribution};

use alloc::vec::Vec;

/// `n` equispaced values from `lo` to `hi`, both included.
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    v[n - 1] = hi;
    v
}

pub(crate) fn column_range(scores: &crate::Matrix, k: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for row in scores.row_iter() {
        lo = lo.min(row[k]);
        hi = hi.max(row[k]);
    }
    (lo, hi)
}
