//! Exact flow of a quadratic in its eigenbasis: each coordinate is an
//! independent harmonic oscillator started from rest.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormState {
    pub x: DVector<f64>,
    pub v: DVector<f64>,
    pub kinetic: f64,
}

/// xᵢ(t) = x0ᵢ cos(√λᵢ t), vᵢ(t) = −x0ᵢ √λᵢ sin(√λᵢ t),
/// E_K(t) = Σ λᵢ x0ᵢ² sin²(√λᵢ t)/2.
pub fn quadratic_closed_form(lambdas: &[f64], x0: &DVector<f64>, t: f64) -> Result<ClosedFormState> {
    if lambdas.len() != x0.len() {
        return Err(Error::DimensionMismatch { expected: lambdas.len(), found: x0.len() });
    }
    if let Some(&bad) = lambdas.iter().find(|&&l| !(l > 0.0)) {
        return Err(Error::InvalidParameter(format!("eigenvalues must be positive, got {bad}")));
    }
    let omega: Vec<f64> = lambdas.iter().map(|l| l.sqrt()).collect();
    let x = DVector::from_iterator(x0.len(), x0.iter().zip(&omega).map(|(xi, w)| xi * (w * t).cos()));
    let v = DVector::from_iterator(x0.len(), x0.iter().zip(&omega).map(|(xi, w)| -xi * w * (w * t).sin()));
    let kinetic = lambdas
        .iter()
        .zip(x0.iter())
        .zip(&omega)
        .map(|((l, xi), w)| l * xi * xi / 2.0 * (w * t).sin().powi(2))
        .sum();
    Ok(ClosedFormState { x, v, kinetic })
}

/// r(t) = E_K/t, with r(0) = 0.
pub fn mean_dissipation(kinetic: f64, t: f64) -> f64 {
    if t > 0.0 {
        kinetic / t
    } else {
        0.0
    }
}

/// r'(0) = ½|∇f(x0)|², the continuous extension of the derivative at 0.
pub fn mean_dissipation_slope_at_zero(grad0: &DVector<f64>) -> f64 {
    0.5 * grad0.norm_squared()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedIntervalDecrease {
    /// f(x(π/(2√λ_max))) / f(x0) for f = ½Σλᵢxᵢ².
    pub ratio: f64,
    /// cos²((π/2)√(λ_min/λ_max)).
    pub bound: f64,
    pub pass: bool,
}

/// Decrease after a free evolution of length π/(2√λ_max) from rest, compared
/// with the cos² bound (tolerance 1e-12).
pub fn quadratic_fixed_interval_decrease(lambdas: &[f64], x0: &DVector<f64>) -> Result<FixedIntervalDecrease> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("empty spectrum".into()));
    }
    let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let value = |x: &DVector<f64>| 0.5 * lambdas.iter().zip(x.iter()).map(|(l, xi)| l * xi * xi).sum::<f64>();
    let f0 = value(x0);
    if f0 == 0.0 {
        return Err(Error::Degenerate("x0 is the minimizer".into()));
    }
    let t = std::f64::consts::FRAC_PI_2 / hi.sqrt();
    let state = quadratic_closed_form(lambdas, x0, t)?;
    let ratio = value(&state.x) / f0;
    let bound = (std::f64::consts::FRAC_PI_2 * (lo / hi).sqrt()).cos().powi(2);
    Ok(FixedIntervalDecrease { ratio, bound, pass: ratio <= bound + 1e-12 })
}
