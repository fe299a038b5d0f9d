//! Objective functions: the smooth families used throughout the benchmarks,
//! their random generators, and the ℓ¹-composite wrapper.

mod composite;
mod generators;
mod io;
mod logistic;
mod logsumexp;
mod quadratic;

use nalgebra::DVector;

pub use composite::{l1_weight_rule, minimal_norm_subgradient_from, CompositeObjective, ProblemKind};
pub use generators::{
    gen_logistic_instance, gen_logsumexp_instance, gen_random_quadratic, seeded_rng, standard_normal_vector,
    LogisticInstance, LogSumExpInstance,
};
pub use io::{read_matrix, read_vector, write_matrix, write_vector};
pub use logistic::LogisticObjective;
pub use logsumexp::LogSumExpObjective;
pub use quadratic::QuadraticObjective;

/// A differentiable convex function with a known gradient Lipschitz bound.
///
/// Implementations are immutable after construction, so a single instance can
/// be shared by concurrently running methods.
pub trait SmoothObjective: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    /// Upper bound L on the Lipschitz constant of the gradient.
    fn lipschitz(&self) -> f64;
    /// Strong convexity constant μ, when known.
    fn strong_convexity(&self) -> Option<f64> {
        None
    }
}

impl<T: SmoothObjective + ?Sized> SmoothObjective for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (**self).gradient(x)
    }
    fn lipschitz(&self) -> f64 {
        (**self).lipschitz()
    }
    fn strong_convexity(&self) -> Option<f64> {
        (**self).strong_convexity()
    }
}

/// The gradient Lipschitz bound the step-size rules are derived from.
pub fn lipschitz_constant(obj: &dyn SmoothObjective) -> f64 {
    obj.lipschitz()
}

type ValueFn = dyn Fn(&DVector<f64>) -> f64 + Send + Sync;
type GradFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;

/// Objective defined by closures, for ad hoc test functions.
pub struct FnObjective {
    dim: usize,
    value: Box<ValueFn>,
    gradient: Box<GradFn>,
    lipschitz: f64,
    strong_convexity: Option<f64>,
}

impl FnObjective {
    pub fn new(
        dim: usize,
        value: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        lipschitz: f64,
        strong_convexity: Option<f64>,
    ) -> Self {
        Self { dim, value: Box::new(value), gradient: Box::new(gradient), lipschitz, strong_convexity }
    }

    /// One-dimensional objective from a scalar function and its derivative.
    pub fn scalar(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lipschitz: f64,
        strong_convexity: Option<f64>,
    ) -> Self {
        Self::new(1, move |x| f(x[0]), move |x| DVector::from_element(1, df(x[0])), lipschitz, strong_convexity)
    }
}

impl SmoothObjective for FnObjective {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.gradient)(x)
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn strong_convexity(&self) -> Option<f64> {
        self.strong_convexity
    }
}

/// `first + weight·second`; constants combine as L₁ + w·L₂ and μ₁ + w·μ₂.
pub struct WeightedSum<A, B> {
    first: A,
    second: B,
    weight: f64,
}

impl<A: SmoothObjective, B: SmoothObjective> WeightedSum<A, B> {
    pub fn new(first: A, second: B, weight: f64) -> crate::Result<Self> {
        if first.dim() != second.dim() {
            return Err(crate::Error::DimensionMismatch { expected: first.dim(), found: second.dim() });
        }
        if !(weight >= 0.0) {
            return Err(crate::Error::InvalidParameter(format!("weight must be nonnegative, got {weight}")));
        }
        Ok(Self { first, second, weight })
    }

    pub fn first(&self) -> &A {
        &self.first
    }

    pub fn second(&self) -> &B {
        &self.second
    }
}

impl<A: SmoothObjective, B: SmoothObjective> SmoothObjective for WeightedSum<A, B> {
    fn dim(&self) -> usize {
        self.first.dim()
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.first.value(x) + self.weight * self.second.value(x)
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.first.gradient(x) + self.second.gradient(x) * self.weight
    }
    fn lipschitz(&self) -> f64 {
        self.first.lipschitz() + self.weight * self.second.lipschitz()
    }
    fn strong_convexity(&self) -> Option<f64> {
        let mu = self.first.strong_convexity()?;
        Some(mu + self.weight * self.second.strong_convexity().unwrap_or(0.0))
    }
}

/// Central finite-difference gradient with step `1e-6·(1 + |x_i|)`.
pub fn finite_difference_gradient(obj: &dyn SmoothObjective, x: &DVector<f64>) -> DVector<f64> {
    let mut g = DVector::zeros(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let step = 1e-6 * (1.0 + x[i].abs());
        probe[i] = x[i] + step;
        let up = obj.value(&probe);
        probe[i] = x[i] - step;
        let down = obj.value(&probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * step);
    }
    g
}

/// Relative error between the analytic and finite-difference gradients,
/// `|g − g_fd| / max(|g|, |g_fd|, 1)`.
pub fn gradient_check(obj: &dyn SmoothObjective, x: &DVector<f64>) -> f64 {
    let g = obj.gradient(x);
    let fd = finite_difference_gradient(obj, x);
    (&g - &fd).norm() / g.norm().max(fd.norm()).max(1.0)
}
