use nalgebra::{DMatrix, DVector};

use super::SmoothObjective;
use crate::error::{Error, Result};
use crate::linalg::asymmetry;

/// f(x) = ½xᵀAx + bᵀx with A symmetric positive definite.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    a: DMatrix<f64>,
    b: DVector<f64>,
    eigen_bounds: (f64, f64),
}

impl QuadraticObjective {
    /// Validates symmetry (1e-12 relative) and positive definiteness, and
    /// computes `(λ_min, λ_max)` by symmetric eigendecomposition.
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
        }
        if b.len() != a.nrows() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.len() });
        }
        let asym = asymmetry(&a);
        if asym > 1e-12 {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let eig = a.clone().symmetric_eigen();
        let lo = eig.eigenvalues.min();
        let hi = eig.eigenvalues.max();
        if !(lo > 0.0) {
            return Err(Error::NotPositiveDefinite { lambda_min: lo });
        }
        Ok(Self { a, b, eigen_bounds: (lo, hi) })
    }

    pub fn diagonal(diag: &[f64], b: DVector<f64>) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)), b)
    }

    /// Trusts the caller for symmetry and the spectrum bounds.
    pub(crate) fn from_spectrum(a: DMatrix<f64>, b: DVector<f64>, eigen_bounds: (f64, f64)) -> Self {
        Self { a, b, eigen_bounds }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn linear(&self) -> &DVector<f64> {
        &self.b
    }

    /// `(λ_min, λ_max)`.
    pub fn eigen_bounds(&self) -> (f64, f64) {
        self.eigen_bounds
    }

    /// x* = −A⁻¹b by Cholesky, with one step of iterative refinement.
    pub fn minimizer(&self) -> Result<DVector<f64>> {
        let chol = self
            .a
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite { lambda_min: self.eigen_bounds.0 })?;
        let rhs = -&self.b;
        let mut x = chol.solve(&rhs);
        let residual = &rhs - &self.a * &x;
        x += chol.solve(&residual);
        Ok(x)
    }

    pub fn min_value(&self) -> Result<f64> {
        Ok(self.value(&self.minimizer()?))
    }
}

impl SmoothObjective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.a * x)) + self.b.dot(x)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.b
    }

    fn lipschitz(&self) -> f64 {
        self.eigen_bounds.1
    }

    fn strong_convexity(&self) -> Option<f64> {
        Some(self.eigen_bounds.0)
    }
}
