//! One-way, two-group ANOVA per FPC score column.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaRow {
    pub fpc: usize,
    pub ss_model: f64,
    pub ss_error: f64,
    pub ss_total: f64,
    pub df_model: f64,
    pub df_error: f64,
    /// `+∞` when the classes separate perfectly (`MS_error = 0`).
    #[serde(with = "crate::serde_float")]
    pub f_statistic: f64,
    pub p_value: f64,
    pub eta_squared: f64,
    pub infinite_f: bool,
}

/// Tests `ν_ik = μ_k + α_k Y_i + ε_ik` for every column `k`.
///
/// Sums of squares are computed independently (not by subtraction). A
/// column without any variation reports `F = 0`, `p = 1`, `η² = 0`.
pub fn anova_fpc(scores: &Matrix, labels: &[u8]) -> Result<Vec<AnovaRow>> {
    let n = scores.rows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    let n1 = labels.iter().filter(|&&y| y == 1).count();
    let n0 = labels.iter().filter(|&&y| y == 0).count();
    if n0 + n1 != n {
        return Err(Error::InvalidDataset("labels must be 0 or 1"));
    }
    if n0 == 0 || n1 == 0 {
        return Err(Error::DegenerateGroups { n0, n1 });
    }
    if n < 3 {
        return Err(Error::InvalidDataset("ANOVA needs at least 3 observations"));
    }
    Ok((0..scores.cols())
        .map(|k| {
            let col = scores.column(k);
            one_way(k, &col, labels, [n0, n1])
        })
        .collect())
}

fn one_way(fpc: usize, x: &[f64], labels: &[u8], sizes: [usize; 2]) -> AnovaRow {
    let n = x.len() as f64;
    let grand = x.iter().sum::<f64>() / n;
    let mut sums = [0.0; 2];
    for (&v, &y) in x.iter().zip(labels) {
        sums[usize::from(y)] += v;
    }
    let means = [sums[0] / sizes[0] as f64, sums[1] / sizes[1] as f64];

    let ss_model: f64 = (0..2)
        .map(|g| sizes[g] as f64 * (means[g] - grand) * (means[g] - grand))
        .sum();
    let ss_error: f64 = x
        .iter()
        .zip(labels)
        .map(|(&v, &y)| {
            let d = v - means[usize::from(y)];
            d * d
        })
        .sum();
    let ss_total: f64 = x.iter().map(|&v| (v - grand) * (v - grand)).sum();

    let df_model = 1.0;
    let df_error = n - 2.0;
    let (f_statistic, p_value, eta_squared, infinite_f) = if ss_model == 0.0 || ss_total == 0.0 {
        (0.0, 1.0, 0.0, false)
    } else if ss_error == 0.0 {
        (f64::INFINITY, 0.0, 1.0, true)
    } else {
        let f = (ss_model / df_model) / (ss_error / df_error);
        (
            f,
            math::f_distribution_sf(f, df_model, df_error),
            ss_model / ss_total,
            false,
        )
    };
    AnovaRow {
        fpc,
        ss_model,
        ss_error,
        ss_total,
        df_model,
        df_error,
        f_statistic,
        p_value,
        eta_squared,
        infinite_f,
    }
}
