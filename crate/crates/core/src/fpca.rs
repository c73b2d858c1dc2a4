//! Functional principal component analysis on a quadrature grid.
//!
//! Smoothed curves are evaluated on the observation grid, centered, and the
//! covariance operator is discretized with trapezoidal weights `w`. With
//! `W = diag(w)` the symmetric matrix `W^½ Σ W^½` is diagonalized; its unit
//! eigenvectors `u_k` map to eigenfunctions `ξ_k = W^-½ u_k`, which are
//! orthonormal under `⟨f, g⟩_w = Σ_j w_j f_j g_j`.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::{Matrix, SymmetricEigen};
use crate::math;
use crate::smooth::SmoothedCurves;

/// Eigenvalues below this fraction of the largest count as numerically zero.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FpcaModel {
    pub grid: TimeGrid,
    /// `μ(t_j)`.
    pub mean_curve: Vec<f64>,
    /// `K × T`; row `k` is `ξ_k` sampled on the grid.
    pub eigenfunctions: Matrix,
    /// Descending, nonnegative.
    pub eigenvalues: Vec<f64>,
    /// Training scores, `N × K`.
    pub scores: Matrix,
    /// Trace of the discretized covariance operator (all components).
    pub total_variance: f64,
    /// `‖ε_i‖_w` per training curve after reconstruction with all `K` components.
    pub reconstruction_residual_norm: Vec<f64>,
}

/// Decomposes smoothed curves into `n_components` functional principal
/// components.
///
/// Fails with [`Error::RankError`] when `n_components` exceeds
/// `min(N − 1, S)` or the numerical rank of curves that do vary. Curves with
/// no variation at all produce a valid model whose eigenvalues are zero.
pub fn fit_fpca(smoothed: &SmoothedCurves, n_components: usize) -> Result<FpcaModel> {
    let n = smoothed.len();
    let s = smoothed.basis().n_basis();
    let available = s.min(n.saturating_sub(1));
    if n_components == 0 || n_components > available {
        return Err(Error::RankError {
            requested: n_components,
            available,
        });
    }
    let grid = smoothed.basis().grid().clone();
    let t = grid.len();
    let values = smoothed.evaluate();

    let mut mean_curve = vec![0.0; t];
    for row in values.row_iter() {
        for (m, v) in mean_curve.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean_curve {
        *m /= n as f64;
    }

    let sqrt_w: Vec<f64> = grid.weights().iter().map(|&w| math::sqrt(w)).collect();
    let mut centered = values.clone();
    let mut scaled = Matrix::zeros(n, t);
    for i in 0..n {
        let row = centered.row_mut(i);
        for (v, m) in row.iter_mut().zip(&mean_curve) {
            *v -= m;
        }
        let row = centered.row(i).to_vec();
        for (j, v) in scaled.row_mut(i).iter_mut().enumerate() {
            *v = row[j] * sqrt_w[j];
        }
    }

    // lower triangle of YᵀY / (N − 1), mirrored
    let mut cov = Matrix::zeros(t, t);
    let denom = (n - 1) as f64;
    for row in scaled.row_iter() {
        for a in 0..t {
            let ra = row[a];
            if ra == 0.0 {
                continue;
            }
            for b in 0..=a {
                let v = cov.get(a, b) + ra * row[b];
                cov.set(a, b, v);
            }
        }
    }
    for a in 0..t {
        for b in 0..=a {
            let v = cov.get(a, b) / denom;
            cov.set(a, b, v);
            cov.set(b, a, v);
        }
    }
    let mut total_variance: f64 = (0..t).map(|j| cov.get(j, j)).sum();

    let eig = SymmetricEigen::new(&cov)?;
    let lambda_max = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    // variation at rounding level of the curves themselves counts as none
    let energy = values
        .row_iter()
        .map(|row| grid.inner_product(row, row))
        .fold(0.0, f64::max);
    let flat = lambda_max <= f64::EPSILON * energy;
    if flat {
        total_variance = 0.0;
    } else {
        let rank = eig
            .values
            .iter()
            .take_while(|&&l| l > RANK_TOL * lambda_max)
            .count();
        if rank < n_components {
            return Err(Error::RankError {
                requested: n_components,
                available: rank,
            });
        }
    }

    let mut eigenfunctions = Matrix::zeros(n_components, t);
    let mut eigenvalues = Vec::with_capacity(n_components);
    for k in 0..n_components {
        eigenvalues.push(if flat { 0.0 } else { eig.values[k].max(0.0) });
        let u = eig.vectors.row(k);
        let xi = eigenfunctions.row_mut(k);
        for j in 0..t {
            xi[j] = u[j] / sqrt_w[j];
        }
        canonicalize_sign(xi);
    }

    let scores = inner_products(&grid, &centered, &eigenfunctions);
    let reconstruction_residual_norm = (0..n)
        .map(|i| {
            let mut resid = centered.row(i).to_vec();
            for k in 0..n_components {
                let nu = scores.get(i, k);
                for (r, x) in resid.iter_mut().zip(eigenfunctions.row(k)) {
                    *r -= nu * x;
                }
            }
            math::sqrt(grid.inner_product(&resid, &resid))
        })
        .collect();

    Ok(FpcaModel {
        grid,
        mean_curve,
        eigenfunctions,
        eigenvalues,
        scores,
        total_variance,
        reconstruction_residual_norm,
    })
}

/// Flips `xi` so that its entry of largest magnitude (first one on ties) is positive.
fn canonicalize_sign(xi: &mut [f64]) {
    let mut best = 0;
    for (j, v) in xi.iter().enumerate() {
        if v.abs() > xi[best].abs() {
            best = j;
        }
    }
    if xi[best] < 0.0 {
        for v in xi.iter_mut() {
            *v = -*v;
        }
    }
}

fn inner_products(grid: &TimeGrid, centered: &Matrix, eigenfunctions: &Matrix) -> Matrix {
    let k = eigenfunctions.rows();
    let mut scores = Matrix::zeros(centered.rows(), k);
    for (i, row) in centered.row_iter().enumerate() {
        for c in 0..k {
            scores.set(i, c, grid.inner_product(row, eigenfunctions.row(c)));
        }
    }
    scores
}

impl FpcaModel {
    pub fn n_components(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Scores of new smoothed curves in this model's mean and eigenbasis.
    pub fn project(&self, smoothed: &SmoothedCurves) -> Result<Matrix> {
        if smoothed.basis().grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        self.project_values(&smoothed.evaluate())
    }

    /// Scores of curves already sampled on the model grid (`N × T`).
    pub fn project_values(&self, values: &Matrix) -> Result<Matrix> {
        if values.cols() != self.grid.len() {
            return Err(Error::GridMismatch);
        }
        let mut centered = values.clone();
        for i in 0..centered.rows() {
            for (v, m) in centered.row_mut(i).iter_mut().zip(&self.mean_curve) {
                *v -= m;
            }
        }
        Ok(inner_products(&self.grid, &centered, &self.eigenfunctions))
    }

    /// `μ + Σ_{k<p} ν_k ξ_k` on the grid, for `1 ≤ p ≤ K`.
    pub fn reconstruct(&self, scores: &[f64], truncate_at: usize) -> Result<Vec<f64>> {
        let k = self.n_components();
        if scores.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: scores.len(),
            });
        }
        if truncate_at == 0 || truncate_at > k {
            return Err(Error::IndexOutOfRange {
                index: truncate_at,
                limit: k,
            });
        }
        let mut curve = self.mean_curve.clone();
        for (c, &nu) in scores.iter().enumerate().take(truncate_at) {
            for (x, xi) in curve.iter_mut().zip(self.eigenfunctions.row(c)) {
                *x += nu * xi;
            }
        }
        Ok(curve)
    }

    /// Contribution of one component alone, `ν ξ_k`, optionally shifted by the
    /// mean. `fpc` is zero-based.
    pub fn reconstruct_single(&self, fpc: usize, score: f64, include_mean: bool) -> Result<Vec<f64>> {
        if fpc >= self.n_components() {
            return Err(Error::IndexOutOfRange {
                index: fpc,
                limit: self.n_components(),
            });
        }
        let xi = self.eigenfunctions.row(fpc);
        Ok(if include_mean {
            self.mean_curve
                .iter()
                .zip(xi)
                .map(|(m, x)| m + score * x)
                .collect()
        } else {
            xi.iter().map(|x| score * x).collect()
        })
    }

    /// `λ_k` divided by the total variance; fails with
    /// [`Error::DegenerateModel`] when there is none.
    pub fn explained_variance(&self) -> Result<Vec<f64>> {
        if !(self.total_variance > 0.0) {
            return Err(Error::DegenerateModel);
        }
        Ok(self
            .eigenvalues
            .iter()
            .map(|l| l / self.total_variance)
            .collect())
    }
}

/// Normalized weighted L2 distance
/// `{ ∫ (x₁ − x₂)² w dt / ∫ w dt }^½` by trapezoidal quadrature. `weight`
/// defaults to `w ≡ 1`.
pub fn l2_distance(grid: &TimeGrid, x1: &[f64], x2: &[f64], weight: Option<&[f64]>) -> Result<f64> {
    let t = grid.len();
    for len in [x1.len(), x2.len()] {
        if len != t {
            return Err(Error::GridMismatch);
        }
    }
    let ones;
    let w = match weight {
        Some(w) => {
            if w.len() != t {
                return Err(Error::GridMismatch);
            }
            if w.iter().any(|&v| !(v > 0.0)) {
                return Err(Error::NonpositiveWeight);
            }
            w
        }
        None => {
            ones = vec![1.0; t];
            &ones[..]
        }
    };
    let sq: Vec<f64> = x1
        .iter()
        .zip(x2)
        .zip(w)
        .map(|((a, b), w)| (a - b) * (a - b) * w)
        .collect();
    Ok(math::sqrt(grid.integrate(&sq) / grid.integrate(w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_basis;
    use crate::dataset::FunctionalDataset;
    use crate::smooth::smooth;
    use core::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn smoothed_from(grid: &TimeGrid, rows: &[Vec<f64>], n_basis: usize) -> SmoothedCurves {
        let data =
            FunctionalDataset::new(grid.clone(), Matrix::from_rows(rows).unwrap(), None).unwrap();
        let basis = build_basis(grid, n_basis, 4).unwrap();
        smooth(&data, &basis, 0.0).unwrap()
    }

    fn normal(rng: &mut ChaCha8Rng) -> f64 {
        // Box-Muller
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    fn sine_cosine_model() -> (TimeGrid, SmoothedCurves, FpcaModel) {
        let grid = TimeGrid::uniform(0.0, 1.0, 60).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<Vec<f64>> = (0..500)
            .map(|_| {
                let a = 2.0 * normal(&mut rng);
                let b = normal(&mut rng);
                grid.points()
                    .iter()
                    .map(|t| a * (2.0 * PI * t).sin() + b * (2.0 * PI * t).cos())
                    .collect()
            })
            .collect();
        let sm = smoothed_from(&grid, &rows, 15);
        let model = fit_fpca(&sm, 2).unwrap();
        (grid, sm, model)
    }

    #[test]
    fn recovers_two_component_model() {
        let (grid, _, model) = sine_cosine_model();
        let sin: Vec<f64> = grid.points().iter().map(|t| (2.0 * PI * t).sin()).collect();
        let sin_norm_sq = grid.inner_product(&sin, &sin);
        // var(a) = 4, Monte Carlo with N = 500 → allow 15 %
        let expected = 4.0 * sin_norm_sq;
        assert!((model.eigenvalues[0] - expected).abs() < 0.15 * expected);
        let xi = model.eigenfunctions.row(0);
        let rho = grid.inner_product(xi, &sin) / sin_norm_sq.sqrt();
        assert!(rho.abs() > 0.99, "rho = {rho}");
    }

    #[test]
    fn contracts_hold_on_random_model() {
        let (grid, sm, model) = sine_cosine_model();
        for a in 0..2 {
            for b in 0..2 {
                let ip = grid.inner_product(model.eigenfunctions.row(a), model.eigenfunctions.row(b));
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((ip - target).abs() < 1e-8);
            }
        }
        let n = model.scores.rows() as f64;
        for k in 0..2 {
            let col = model.scores.column(k);
            let mean = col.iter().sum::<f64>() / n;
            assert!(mean.abs() < 1e-8);
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            assert!((var - model.eigenvalues[k]).abs() < 1e-6 * model.eigenvalues[k]);
        }
        // project reproduces training scores
        let again = model.project(&sm).unwrap();
        for (a, b) in again.as_slice().iter().zip(model.scores.as_slice()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn identical_curves_have_zero_variance() {
        let grid = TimeGrid::uniform(0.0, 1.0, 30).unwrap();
        let curve: Vec<f64> = grid.points().iter().map(|t| t * t - 0.3).collect();
        let sm = smoothed_from(&grid, &[curve.clone(), curve.clone(), curve.clone()], 8);
        let model = fit_fpca(&sm, 2).unwrap();
        let fitted = sm.evaluate();
        for (m, f) in model.mean_curve.iter().zip(fitted.row(0)) {
            assert!((m - f).abs() < 1e-12);
        }
        assert!(model.eigenvalues.iter().all(|l| l.abs() < 1e-10));
        assert_eq!(model.explained_variance().unwrap_err(), Error::DegenerateModel);
    }

    #[test]
    fn too_many_components_is_a_rank_error() {
        let grid = TimeGrid::uniform(0.0, 1.0, 30).unwrap();
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i| grid.points().iter().map(|t| (i as f64) * t).collect())
            .collect();
        let sm = smoothed_from(&grid, &rows, 8);
        assert!(matches!(fit_fpca(&sm, 4), Err(Error::RankError { .. })));
        assert!(matches!(fit_fpca(&sm, 0), Err(Error::RankError { .. })));
        // the curves span one direction only
        assert_eq!(
            fit_fpca(&sm, 2).unwrap_err(),
            Error::RankError {
                requested: 2,
                available: 1
            }
        );
    }

    #[test]
    fn projection_of_mean_and_shifted_mean() {
        let (_, _, model) = sine_cosine_model();
        let mean = Matrix::from_rows(core::slice::from_ref(&model.mean_curve)).unwrap();
        let zero = model.project_values(&mean).unwrap();
        assert!(zero.as_slice().iter().all(|v| v.abs() < 1e-8));

        let shifted = model.reconstruct_single(0, 2.0, true).unwrap();
        let row = model
            .project_values(&Matrix::from_rows(&[shifted]).unwrap())
            .unwrap();
        assert!((row.get(0, 0) - 2.0).abs() < 1e-6);
        assert!(row.get(0, 1).abs() < 1e-6);
    }

    #[test]
    fn reconstruction_properties() {
        let (grid, sm, model) = sine_cosine_model();
        assert_eq!(model.reconstruct(&[0.0, 0.0], 2).unwrap(), model.mean_curve);
        let fitted = sm.evaluate();
        for i in 0..20 {
            let row = model.scores.row(i);
            let mut prev = f64::INFINITY;
            for p in 1..=2 {
                let rec = model.reconstruct(row, p).unwrap();
                let diff: Vec<f64> = rec.iter().zip(fitted.row(i)).map(|(a, b)| a - b).collect();
                let err = grid.inner_product(&diff, &diff).sqrt();
                assert!(err <= prev + 1e-12);
                prev = err;
            }
            assert!(prev <= model.reconstruction_residual_norm[i] + 1e-9);
        }
        assert!(model.reconstruct(&[0.0, 0.0], 0).is_err());
        assert!(model.reconstruct(&[0.0, 0.0], 3).is_err());
    }

    #[test]
    fn single_component_reconstruction() {
        let (grid, _, model) = sine_cosine_model();
        assert_eq!(model.reconstruct_single(1, 0.0, true).unwrap(), model.mean_curve);
        let unit = model.reconstruct_single(0, 1.0, false).unwrap();
        assert!((grid.inner_product(&unit, &unit) - 1.0).abs() < 1e-8);
        let s = 0.7;
        let one = model.reconstruct_single(0, s, true).unwrap();
        let two = model.reconstruct_single(0, 2.0 * s, true).unwrap();
        for ((a, b), m) in one.iter().zip(&two).zip(&model.mean_curve) {
            let lhs = b - m;
            let rhs = 2.0 * (a - m);
            assert!((lhs - rhs).abs() <= 1e-15 * (1.0 + lhs.abs()));
        }
        assert!(model.reconstruct_single(2, 1.0, false).is_err());
    }

    #[test]
    fn explained_variance_arithmetic() {
        let grid = TimeGrid::uniform(0.0, 1.0, 4).unwrap();
        let mut model = FpcaModel {
            grid,
            mean_curve: vec![0.0; 4],
            eigenfunctions: Matrix::zeros(2, 4),
            eigenvalues: vec![4.0, 1.0],
            scores: Matrix::zeros(1, 2),
            total_variance: 5.0,
            reconstruction_residual_norm: vec![0.0],
        };
        assert_eq!(model.explained_variance().unwrap(), vec![0.8, 0.2]);
        model.eigenvalues = vec![2.0, 2.0];
        model.total_variance = 4.0;
        assert_eq!(model.explained_variance().unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn refitting_is_bit_identical() {
        let (_, sm, model) = sine_cosine_model();
        let again = fit_fpca(&sm, 2).unwrap();
        assert_eq!(model, again);
    }

    #[test]
    fn l2_distance_examples() {
        let grid = TimeGrid::uniform(0.0, 2.0 * PI, 1000).unwrap();
        let s: Vec<f64> = grid.points().iter().map(|t| t.sin()).collect();
        let z = vec![0.0; 1000];
        let d = l2_distance(&grid, &s, &z, None).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-3);
        assert_eq!(l2_distance(&grid, &s, &s, None).unwrap(), 0.0);
        let c: Vec<f64> = grid.points().iter().map(|t| t.cos()).collect();
        assert_eq!(
            l2_distance(&grid, &s, &c, None).unwrap(),
            l2_distance(&grid, &c, &s, None).unwrap()
        );
        let mut w = vec![1.0; 1000];
        w[10] = 0.0;
        assert_eq!(
            l2_distance(&grid, &s, &c, Some(&w)).unwrap_err(),
            Error::NonpositiveWeight
        );
    }
}
