//! Functional data classification with explainability tools.
//!
//! The crate covers the whole numerical pipeline and nothing else: it
//! performs no IO and only needs `alloc`.
//!
//! 1. [`basis`] and [`smooth`] turn discrete observations into B-spline curves.
//! 2. [`fpca`] decomposes the curves into a mean, orthonormal eigenfunctions
//!    and per-curve scores.
//! 3. [`tree`] and [`forest`] grow classification trees on the score matrix and
//!    bag them into a functional random forest.
//! 4. [`explain`] computes partial dependence, probability heatmaps,
//!    reconstruction bands and internal/external importance measures.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
// NaN must fail `!(a > b)` checks; dense kernels read better indexed
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod basis;
pub mod dataset;
mod error;
pub mod explain;
pub mod forest;
pub mod fpca;
pub mod grid;
pub mod linalg;
pub mod math;
pub mod rng;
pub mod serde_float;
pub mod smooth;
pub mod tree;

pub use basis::{build_basis, BasisSystem};
pub use dataset::FunctionalDataset;
pub use error::{Error, Result};
pub use forest::{
    fit_forest, ForestConfig, ForestPlan, FunctionalRandomForest, OobReport, ProbabilityMode,
};
pub use fpca::{fit_fpca, l2_distance, FpcaModel};
pub use grid::TimeGrid;
pub use linalg::Matrix;
pub use smooth::{smooth, SmoothedCurves};
pub use tree::{Criterion, SplitRule, TreeNode};

/// Anything that maps a row of FPC scores to a class-1 probability.
///
/// Explainability routines are generic over this trait so they work with a
/// whole forest, a single tree or a test double.
pub trait Predictor {
    /// Number of score columns the predictor expects.
    fn n_features(&self) -> usize;

    /// Probability of class 1 for one score row.
    fn predict_proba(&self, row: &[f64]) -> f64;

    /// Hard label; ties at exactly 0.5 go to class 0.
    fn predict_label(&self, row: &[f64]) -> u8 {
        u8::from(self.predict_proba(row) > 0.5)
    }
}
