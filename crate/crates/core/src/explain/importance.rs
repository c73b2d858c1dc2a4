//! Internal importance measures (mean decrease in impurity, permutation
//! importance) and the combined per-FPC importance table.

use alloc::vec::Vec;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::anova::AnovaRow;
use crate::error::{Error, Result};
use crate::forest::FunctionalRandomForest;
use crate::linalg::Matrix;
use crate::rng;
use crate::Predictor;

/// How each split's impurity decrease enters MDG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MdgWeighting {
    /// Decrease times the fraction of the tree's sample reaching the node.
    #[default]
    NodeFraction,
    /// Raw decrease at the node.
    Unweighted,
}

/// `MDG(k) = (1/M) Σ_trees Σ_{splits on k} ΔG`.
pub fn mdg_importance(forest: &FunctionalRandomForest, weighting: MdgWeighting) -> Vec<f64> {
    let mut totals = alloc::vec![0.0; forest.n_features()];
    for tree in forest.trees() {
        for split in tree.splits() {
            totals[split.fpc] += match weighting {
                MdgWeighting::NodeFraction => split.decrease * split.node_fraction,
                MdgWeighting::Unweighted => split.decrease,
            };
        }
    }
    let m = forest.trees().len() as f64;
    for t in &mut totals {
        *t /= m;
    }
    totals
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationImportance {
    /// Misclassification rate before any permutation, computed once.
    pub baseline_error: f64,
    /// Mean over repeats, per FPC.
    pub importances: Vec<f64>,
    /// `per_repeat[k][r]`: permuted error minus baseline.
    pub per_repeat: Vec<Vec<f64>>,
    /// `true` when errors are out-of-bag errors of the forest.
    pub out_of_bag: bool,
}

fn misclassification<P: Predictor + ?Sized>(model: &P, scores: &Matrix, labels: &[u8]) -> f64 {
    let wrong = scores
        .row_iter()
        .zip(labels)
        .filter(|(row, &y)| model.predict_label(row) != y)
        .count();
    wrong as f64 / labels.len() as f64
}

/// `scores` with column `fpc` replaced by `scores[perm[i]][fpc]` in row `i`.
pub fn permute_column(scores: &Matrix, fpc: usize, perm: &[usize]) -> Matrix {
    let mut out = scores.clone();
    for (i, &src) in perm.iter().enumerate() {
        out.set(i, fpc, scores.get(src, fpc));
    }
    out
}

/// Misclassification rate of `model` after applying `perm` to column `fpc`.
pub fn permuted_error<P: Predictor + ?Sized>(
    model: &P,
    scores: &Matrix,
    labels: &[u8],
    fpc: usize,
    perm: &[usize],
) -> f64 {
    misclassification(model, &permute_column(scores, fpc, perm), labels)
}

fn check_inputs(scores: &Matrix, labels: &[u8], repeats: usize) -> Result<()> {
    if scores.rows() == 0 {
        return Err(Error::EmptyData);
    }
    if labels.len() != scores.rows() {
        return Err(Error::DimensionMismatch {
            expected: scores.rows(),
            found: labels.len(),
        });
    }
    if repeats == 0 {
        return Err(Error::InvalidConfig("permutation importance needs at least one repeat"));
    }
    Ok(())
}

/// The permutation for FPC `fpc`, repeat `repeat`: a pure function of
/// `(seed, fpc, repeat)`.
pub fn permutation_for(seed: u64, fpc: usize, repeat: usize, n: usize) -> Vec<usize> {
    let index = ((fpc as u64) << 32) | repeat as u64;
    let mut stream = rng::stream(seed, rng::PERMUTATION_DOMAIN, index);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut stream);
    perm
}

fn run<F: FnMut(&Matrix) -> f64>(
    scores: &Matrix,
    repeats: usize,
    seed: u64,
    mut error: F,
    out_of_bag: bool,
) -> PermutationImportance {
    let baseline_error = error(scores);
    let k = scores.cols();
    let mut per_repeat = Vec::with_capacity(k);
    for fpc in 0..k {
        let deltas: Vec<f64> = (0..repeats)
            .map(|r| {
                let perm = permutation_for(seed, fpc, r, scores.rows());
                error(&permute_column(scores, fpc, &perm)) - baseline_error
            })
            .collect();
        per_repeat.push(deltas);
    }
    let importances = per_repeat
        .iter()
        .map(|d| d.iter().sum::<f64>() / repeats as f64)
        .collect();
    PermutationImportance {
        baseline_error,
        importances,
        per_repeat,
        out_of_bag,
    }
}

/// Permutation importance on a supplied evaluation set (e.g. the test set).
pub fn permutation_importance<P: Predictor + ?Sized>(
    model: &P,
    scores: &Matrix,
    labels: &[u8],
    repeats: usize,
    seed: u64,
) -> Result<PermutationImportance> {
    check_inputs(scores, labels, repeats)?;
    Ok(run(
        scores,
        repeats,
        seed,
        |s| misclassification(model, s, labels),
        false,
    ))
}

/// Permutation importance on the forest's own training rows, each predicted
/// only by the trees that left it out of bag.
pub fn permutation_importance_oob(
    forest: &FunctionalRandomForest,
    scores: &Matrix,
    labels: &[u8],
    repeats: usize,
    seed: u64,
) -> Result<PermutationImportance> {
    check_inputs(scores, labels, repeats)?;
    let masks = forest.oob_masks()?;
    // validate sizes once; later calls cannot fail
    forest.oob_with_masks(&masks, scores, labels)?;
    Ok(run(
        scores,
        repeats,
        seed,
        |s| {
            forest
                .oob_with_masks(&masks, s, labels)
                .map(|r| r.oob_error_rate)
                .unwrap_or(f64::NAN)
        },
        true,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    /// Zero-based FPC index.
    pub fpc: usize,
    pub mdg: f64,
    pub permutation_importance: f64,
    #[serde(with = "crate::serde_float")]
    pub f_statistic: f64,
    pub p_value: f64,
    pub eta_squared: f64,
    pub explained_variance_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceTable {
    pub rows: Vec<ImportanceRow>,
}

pub fn importance_table(
    mdg: &[f64],
    permutation: &[f64],
    anova: &[AnovaRow],
    explained_variance: &[f64],
) -> Result<ImportanceTable> {
    let k = mdg.len();
    for len in [permutation.len(), anova.len(), explained_variance.len()] {
        if len != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: len,
            });
        }
    }
    Ok(ImportanceTable {
        rows: (0..k)
            .map(|i| ImportanceRow {
                fpc: i,
                mdg: mdg[i],
                permutation_importance: permutation[i],
                f_statistic: anova[i].f_statistic,
                p_value: anova[i].p_value,
                eta_squared: anova[i].eta_squared,
                explained_variance_fraction: explained_variance[i],
            })
            .collect(),
    })
}

impl ImportanceTable {
    pub fn column(&self, pick: impl Fn(&ImportanceRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(pick).collect()
    }
}
