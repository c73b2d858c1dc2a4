//! Penalized least-squares projection of discrete observations onto a basis.

use alloc::vec::Vec;

use crate::basis::BasisSystem;
use crate::dataset::FunctionalDataset;
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};

/// Basis coefficients for every curve of a dataset (`N × S`).
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedCurves {
    basis: BasisSystem,
    coefficients: Matrix,
}

/// Pivot threshold relative to the largest diagonal of the normal matrix.
const SINGULAR_TOL: f64 = 1e-12;

/// Fits `c_i = argmin Σ_j (z_ij − Σ_s c_is φ_s(t_j))² + penalty · ‖D₂ c_i‖²`,
/// where `D₂` takes second differences of adjacent coefficients.
pub fn smooth(
    dataset: &FunctionalDataset,
    basis: &BasisSystem,
    penalty: f64,
) -> Result<SmoothedCurves> {
    if !(penalty >= 0.0) || !penalty.is_finite() {
        return Err(Error::InvalidConfig("penalty must be a finite nonnegative number"));
    }
    if dataset.grid() != basis.grid() {
        return Err(Error::GridMismatch);
    }
    let phi = basis.eval_cache();
    let s = basis.n_basis();
    let t = phi.cols();

    let mut normal = phi.matmul(&phi.transpose())?;
    if penalty > 0.0 && s >= 3 {
        // D₂ᵀD₂ is pentadiagonal; accumulate row by row of D₂.
        for r in 0..s - 2 {
            let stencil = [(r, 1.0), (r + 1, -2.0), (r + 2, 1.0)];
            for &(i, a) in &stencil {
                for &(j, b) in &stencil {
                    let v = normal.get(i, j) + penalty * a * b;
                    normal.set(i, j, v);
                }
            }
        }
    }
    let chol = Cholesky::factor(&normal, SINGULAR_TOL)?;

    let mut coefficients = Matrix::zeros(dataset.len(), s);
    let mut rhs = alloc::vec![0.0; s];
    for (i, z) in dataset.values().row_iter().enumerate() {
        for (k, r) in rhs.iter_mut().enumerate() {
            *r = (0..t).map(|j| phi.get(k, j) * z[j]).sum();
        }
        coefficients.row_mut(i).copy_from_slice(&chol.solve(&rhs));
    }
    Ok(SmoothedCurves {
        basis: basis.clone(),
        coefficients,
    })
}

impl SmoothedCurves {
    pub fn new(basis: BasisSystem, coefficients: Matrix) -> Result<Self> {
        if coefficients.cols() != basis.n_basis() {
            return Err(Error::DimensionMismatch {
                expected: basis.n_basis(),
                found: coefficients.cols(),
            });
        }
        Ok(Self {
            basis,
            coefficients,
        })
    }

    pub fn basis(&self) -> &BasisSystem {
        &self.basis
    }

    pub fn coefficients(&self) -> &Matrix {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.rows() == 0
    }

    /// Curves evaluated on the basis grid (`N × T`).
    pub fn evaluate(&self) -> Matrix {
        self.coefficients
            .matmul(self.basis.eval_cache())
            .expect("coefficient width matches basis size")
    }

    /// Sum of squared differences between fitted curves and observations.
    pub fn residual_sum_of_squares(&self, dataset: &FunctionalDataset) -> f64 {
        let fitted = self.evaluate();
        fitted
            .as_slice()
            .iter()
            .zip(dataset.values().as_slice())
            .map(|(f, z)| (f - z) * (f - z))
            .sum()
    }

    /// Curves built directly from coefficient rows, sharing this basis.
    pub fn with_coefficients(&self, coefficients: Matrix) -> Result<Self> {
        Self::new(self.basis.clone(), coefficients)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.coefficients.row_iter().map(<[f64]>::to_vec).collect()
    }
}
