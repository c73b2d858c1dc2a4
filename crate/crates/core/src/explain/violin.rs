//! Class-conditional score distributions `f(ν_k | Y = y)` for violin plots.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::linspace;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// Points in each kernel density grid.
pub const DENSITY_POINTS: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub fpc: usize,
    pub class: u8,
    pub sample: Vec<f64>,
    /// Type-7 quartiles; `None` for an empty class.
    pub quartiles: Option<[f64; 3]>,
    #[serde(with = "crate::serde_float")]
    pub bandwidth: f64,
    /// Spans `[min − 4h, max + 4h]`; empty for an empty class.
    pub density_grid: Vec<f64>,
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassConditionalScores {
    /// `distributions[k][y]`.
    pub distributions: Vec<[ClassDistribution; 2]>,
}

/// Silverman's rule `0.9 · min(sd, IQR/1.34) · n^(−1/5)`, with the usual
/// fallbacks (sd, then `|x₀|`, then 1) when the spread estimate is zero.
pub fn silverman_bandwidth(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        math::sqrt(sorted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64)
    } else {
        0.0
    };
    let iqr = math::quantile_sorted(sorted, 0.75) - math::quantile_sorted(sorted, 0.25);
    let mut lo = sd.min(iqr / 1.34);
    if !(lo > 0.0) {
        lo = if sd > 0.0 {
            sd
        } else if sorted[0] != 0.0 {
            sorted[0].abs()
        } else {
            1.0
        };
    }
    0.9 * lo * math::pow(n as f64, -0.2)
}

fn distribution(fpc: usize, class: u8, mut sample: Vec<f64>) -> ClassDistribution {
    let mut sorted = sample.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.is_empty() {
        return ClassDistribution {
            fpc,
            class,
            sample,
            quartiles: None,
            bandwidth: f64::NAN,
            density_grid: Vec::new(),
            density: Vec::new(),
        };
    }
    let quartiles = [0.25, 0.5, 0.75].map(|q| math::quantile_sorted(&sorted, q));
    let h = silverman_bandwidth(&sorted);
    let lo = sorted[0] - 4.0 * h;
    let hi = sorted[sorted.len() - 1] + 4.0 * h;
    let density_grid = linspace(lo, hi, DENSITY_POINTS);
    let norm = 1.0 / (sorted.len() as f64 * h * math::sqrt(2.0 * core::f64::consts::PI));
    let density = density_grid
        .iter()
        .map(|&t| {
            norm * sorted
                .iter()
                .map(|&v| {
                    let z = (t - v) / h;
                    math::exp(-0.5 * z * z)
                })
                .sum::<f64>()
        })
        .collect();
    sample.shrink_to_fit();
    ClassDistribution {
        fpc,
        class,
        sample,
        quartiles: Some(quartiles),
        bandwidth: h,
        density_grid,
        density,
    }
}

pub fn scores_by_class(scores: &Matrix, labels: &[u8]) -> Result<ClassConditionalScores> {
    if labels.len() != scores.rows() {
        return Err(Error::DimensionMismatch {
            expected: scores.rows(),
            found: labels.len(),
        });
    }
    if labels.iter().any(|&y| y > 1) {
        return Err(Error::InvalidDataset("labels must be 0 or 1"));
    }
    let distributions = (0..scores.cols())
        .map(|k| {
            let col = scores.column(k);
            let pick = |c: u8| -> Vec<f64> {
                col.iter()
                    .zip(labels)
                    .filter(|(_, &y)| y == c)
                    .map(|(&v, _)| v)
                    .collect()
            };
            [distribution(k, 0, pick(0)), distribution(k, 1, pick(1))]
        })
        .collect();
    Ok(ClassConditionalScores { distributions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
        x.windows(2)
            .zip(y.windows(2))
            .map(|(a, b)| 0.5 * (a[1] - a[0]) * (b[0] + b[1]))
            .sum()
    }

    #[test]
    fn single_value_class() {
        let m = Matrix::from_rows(&[[2.5], [0.0], [1.0]]).unwrap();
        let c = scores_by_class(&m, &[1, 0, 0]).unwrap();
        let d = &c.distributions[0][1];
        assert_eq!(d.quartiles, Some([2.5; 3]));
        let peak = d
            .density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!((d.density_grid[peak] - 2.5).abs() <= d.density_grid[1] - d.density_grid[0]);
    }

    #[test]
    fn quartiles_ordered_and_density_normalised() {
        let mut r = rng::stream(3, 9, 0);
        let rows: Vec<[f64; 2]> = (0..80)
            .map(|_| [r.random::<f64>() * 4.0, r.random::<f64>().powi(3)])
            .collect();
        let labels: Vec<u8> = (0..80).map(|i| (i % 3 == 0) as u8).collect();
        let c = scores_by_class(&Matrix::from_rows(&rows).unwrap(), &labels).unwrap();
        for pair in &c.distributions {
            for d in pair {
                let [q1, q2, q3] = d.quartiles.unwrap();
                assert!(q1 <= q2 && q2 <= q3);
                assert_eq!(d.density.len(), DENSITY_POINTS);
                assert!((trapezoid(&d.density_grid, &d.density) - 1.0).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn empty_class_has_no_quartiles() {
        let m = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        let c = scores_by_class(&m, &[0, 0]).unwrap();
        assert!(c.distributions[0][1].quartiles.is_none());
        assert!(c.distributions[0][1].sample.is_empty());
    }

    #[test]
    fn bandwidth_fallbacks() {
        assert!(silverman_bandwidth(&[0.0, 0.0]) > 0.0);
        assert!(silverman_bandwidth(&[3.0]) > 0.0);
        // sd > 0 but IQR = 0
        assert!(silverman_bandwidth(&[1.0, 1.0, 1.0, 1.0, 1.0, 9.0]) > 0.0);
    }
}
