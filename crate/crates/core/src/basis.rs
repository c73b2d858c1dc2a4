//! Clamped B-spline bases with uniform interior knots.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::Matrix;

/// A B-spline basis over a time grid, with every basis function already
/// evaluated at every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSystem {
    order: usize,
    n_basis: usize,
    knots: Vec<f64>,
    grid: TimeGrid,
    /// `n_basis × T`, entry `(s, j)` is `φ_s(t_j)`.
    eval_cache: Matrix,
}

/// Builds `n_basis` B-splines of the given order (4 = cubic) on the grid's
/// domain. Interior knots are spaced uniformly; boundary knots are repeated
/// `order` times so the first and last functions interpolate the endpoints.
pub fn build_basis(grid: &TimeGrid, n_basis: usize, order: usize) -> Result<BasisSystem> {
    if order < 2 || n_basis < order || grid.len() < TimeGrid::MIN_POINTS {
        return Err(Error::InvalidBasisConfig {
            n_basis,
            order,
            grid_len: grid.len(),
        });
    }
    let (a, b) = (grid.start(), grid.end());
    let n_interior = n_basis - order;
    let mut knots = Vec::with_capacity(n_basis + order);
    knots.extend(core::iter::repeat_n(a, order));
    for i in 1..=n_interior {
        knots.push(a + (b - a) * i as f64 / (n_interior + 1) as f64);
    }
    knots.extend(core::iter::repeat_n(b, order));

    let mut basis = BasisSystem {
        order,
        n_basis,
        knots,
        grid: grid.clone(),
        eval_cache: Matrix::zeros(n_basis, grid.len()),
    };
    let mut values = vec![0.0; order];
    for (j, &t) in grid.points().iter().enumerate() {
        let first = basis.nonzero_at(t, &mut values);
        for (r, v) in values.iter().enumerate() {
            basis.eval_cache.set(first + r, j, *v);
        }
    }
    Ok(basis)
}

impl BasisSystem {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// `φ_s(t_j)` for every basis function `s` and grid point `j`.
    pub fn eval_cache(&self) -> &Matrix {
        &self.eval_cache
    }

    /// All basis functions at an arbitrary `t` inside the domain (clamped
    /// to it otherwise).
    pub fn evaluate(&self, t: f64) -> Vec<f64> {
        let mut values = vec![0.0; self.order];
        let first = self.nonzero_at(t, &mut values);
        let mut out = vec![0.0; self.n_basis];
        out[first..first + self.order].copy_from_slice(&values);
        out
    }

    /// Cox-de Boor recursion for the `order` functions that are nonzero at
    /// `t`. Returns the index of the first of them.
    fn nonzero_at(&self, t: f64, out: &mut [f64]) -> usize {
        let p = self.order - 1;
        let k = &self.knots;
        let t = t.clamp(k[0], k[k.len() - 1]);
        // span index in [p, n_basis - 1]
        let mut span = p;
        while span < self.n_basis - 1 && t >= k[span + 1] {
            span += 1;
        }
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        out[0] = 1.0;
        for j in 1..=p {
            left[j] = t - k[span + 1 - j];
            right[j] = k[span + j] - t;
            let mut saved = 0.0;
            for r in 0..j {
                let denom = right[r + 1] + left[j - r];
                let temp = if denom == 0.0 { 0.0 } else { out[r] / denom };
                out[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            out[j] = saved;
        }
        span - p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid(n: usize) -> TimeGrid {
        TimeGrid::uniform(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn six_cubic_functions_sum_to_one() {
        let b = build_basis(&unit_grid(101), 6, 4).unwrap();
        assert_eq!(b.n_basis(), 6);
        let s: f64 = b.evaluate(0.5).iter().sum();
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partition_of_unity_on_every_grid_point() {
        let b = build_basis(&unit_grid(57), 20, 4).unwrap();
        for j in 0..57 {
            let s: f64 = (0..20).map(|i| b.eval_cache().get(i, j)).sum();
            assert!((s - 1.0).abs() < 1e-10, "t index {j}: {s}");
        }
    }

    #[test]
    fn too_few_functions_is_rejected() {
        assert!(matches!(
            build_basis(&unit_grid(101), 3, 4),
            Err(Error::InvalidBasisConfig { .. })
        ));
        assert!(build_basis(&unit_grid(101), 4, 1).is_err());
    }

    #[test]
    fn bernstein_case_interpolates_endpoints() {
        let b = build_basis(&unit_grid(101), 4, 4).unwrap();
        let at0 = b.evaluate(0.0);
        let at1 = b.evaluate(1.0);
        assert!((at0[0] - 1.0).abs() < 1e-15);
        assert!((at1[3] - 1.0).abs() < 1e-15);
        // cubic Bernstein polynomial B_{1,3}(t) = 3t(1-t)^2
        let mid = b.evaluate(0.3);
        assert!((mid[1] - 3.0 * 0.3 * 0.7 * 0.7).abs() < 1e-14);
    }

    #[test]
    fn linear_splines_are_hat_functions() {
        let b = build_basis(&unit_grid(11), 3, 2).unwrap();
        let v = b.evaluate(0.25);
        assert!((v[0] - 0.5).abs() < 1e-15);
        assert!((v[1] - 0.5).abs() < 1e-15);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn knots_are_clamped_and_uniform() {
        let b = build_basis(&unit_grid(20), 7, 4).unwrap();
        assert_eq!(b.knots(), &[0.0, 0.0, 0.0, 0.0, 0.25, 0.5, 0.75, 1.0, 1.0, 1.0, 1.0]);
    }
}
