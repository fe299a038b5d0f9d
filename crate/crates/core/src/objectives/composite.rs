use nalgebra::DVector;

use super::SmoothObjective;
use crate::error::{Error, Result};

/// f(x) = g(x) + γ·‖x‖₁ with g smooth.
pub struct CompositeObjective {
    smooth: Box<dyn SmoothObjective>,
    l1_weight: f64,
}

impl CompositeObjective {
    /// `l1_weight` must be finite and nonnegative; γ = 0 is the smooth problem.
    pub fn new(smooth: Box<dyn SmoothObjective>, l1_weight: f64) -> Result<Self> {
        if !(l1_weight >= 0.0 && l1_weight.is_finite()) {
            return Err(Error::InvalidParameter(format!("l1 weight must be nonnegative, got {l1_weight}")));
        }
        Ok(Self { smooth, l1_weight })
    }

    pub fn smooth(&self) -> &dyn SmoothObjective {
        self.smooth.as_ref()
    }

    pub fn l1_weight(&self) -> f64 {
        self.l1_weight
    }

    pub fn dim(&self) -> usize {
        self.smooth.dim()
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        self.smooth.value(x) + self.l1_weight * x.lp_norm(1)
    }

    /// ∂⁻f(x): the least-norm element of ∂f(x).
    pub fn minimal_norm_subgradient(&self, x: &DVector<f64>) -> DVector<f64> {
        minimal_norm_subgradient_from(&self.smooth.gradient(x), x, self.l1_weight)
    }
}

/// Coordinatewise least-norm subgradient of g + γ‖·‖₁ given ∇g(x):
/// ∇gᵢ + γ·sign(xᵢ) off the axes, soft-thresholded ∇gᵢ on them.
pub fn minimal_norm_subgradient_from(grad: &DVector<f64>, x: &DVector<f64>, gamma: f64) -> DVector<f64> {
    if gamma == 0.0 {
        return grad.clone();
    }
    grad.zip_map(x, |g, xi| {
        if xi != 0.0 {
            g + gamma * xi.signum()
        } else {
            g - g.clamp(-gamma, gamma)
        }
    })
}

/// Which smooth family a weight rule is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Quadratic,
    Logistic,
    LogSumExp,
}

/// γ that keeps the ℓ¹-regularized minimizer away from the origin:
/// ¼‖b‖_∞ for quadratics, ½‖∇g(0)‖_∞ otherwise. `data` is b or ∇g(0).
pub fn l1_weight_rule(kind: ProblemKind, data: &DVector<f64>) -> Result<f64> {
    let sup = data.amax();
    if sup == 0.0 {
        return Err(Error::Degenerate("l1 weight rule on a zero vector gives gamma = 0".into()));
    }
    Ok(match kind {
        ProblemKind::Quadratic => 0.25 * sup,
        ProblemKind::Logistic | ProblemKind::LogSumExp => 0.5 * sup,
    })
}
