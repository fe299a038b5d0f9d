//! Small dense linear-algebra helpers shared by the objective families.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest eigenvalue of a symmetric positive semidefinite operator by power
/// iteration on the Rayleigh quotient.
///
/// The start vector is fixed (`1 + 1e-3·i`, normalized) so the result is a
/// pure function of the operator.
pub fn power_iteration<F>(dim: usize, apply: F, rel_tol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    if dim == 0 {
        return Err(Error::InvalidParameter("power iteration on empty operator".into()));
    }
    let mut v = DVector::from_fn(dim, |i, _| 1.0 + 1e-3 * i as f64);
    v /= v.norm();
    let mut lambda = 0.0;
    for it in 0..max_iter {
        let w = apply(&v);
        let next = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        if it > 0 && (next - lambda).abs() <= rel_tol * next.abs() {
            return Ok(next);
        }
        lambda = next;
        v = w / norm;
    }
    Err(Error::PowerIteration { iterations: max_iter })
}

/// λ_max(A·Aᵀ) for an n×m matrix, without forming the product.
pub fn lambda_max_aat(a: &DMatrix<f64>) -> Result<f64> {
    power_iteration(a.nrows(), |x| a * (a.transpose() * x), 1e-8, 10_000)
}

/// Largest relative asymmetry max|A_ij − A_ji| / max|A_ij|.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let scale = a.amax();
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst / scale
}

pub fn inf_norm(v: &DVector<f64>) -> f64 {
    v.amax()
}
