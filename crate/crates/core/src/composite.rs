//! ℓ¹-composite methods: the restart-conservative iteration driven by the
//! minimal-norm subgradient, and FISTA with and without gradient restart.

use nalgebra::DVector;

use crate::discrete::{conservative_loop, ConservativeProblem, RcmConfig};
use crate::error::{Error, Result};
use crate::objectives::{CompositeObjective, SmoothObjective};
use crate::trace::Trace;

/// Proximal map of τ‖·‖₁ (soft thresholding).
pub fn prox_l1(z: &DVector<f64>, tau: f64) -> DVector<f64> {
    if tau == 0.0 {
        return z.clone();
    }
    z.map(|zi| zi.signum() * (zi.abs() - tau).max(0.0))
}

/// Zeroes every coordinate whose sign strictly flipped between `x_old` and
/// `x_new`. The flag reports whether any coordinate was projected.
pub fn sign_crossing_projection(x_old: &DVector<f64>, x_new: &DVector<f64>) -> (DVector<f64>, bool) {
    let mut crossed = false;
    let projected = x_old.zip_map(x_new, |a, b| {
        if a * b < 0.0 {
            crossed = true;
            0.0
        } else {
            b
        }
    });
    (projected, crossed)
}

fn check(f: &CompositeObjective, x0: &DVector<f64>, name: &str, step: f64) -> Result<()> {
    if x0.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: x0.len() });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {step}")));
    }
    Ok(())
}

/// Restart-conservative method for g + γ‖·‖₁.
///
/// ∇f is replaced by ∂⁻f throughout. After the restart decision, any
/// coordinate that changed sign is set to 0 and the whole velocity is reset.
/// With γ = 0 there is nothing to cross and the run is identical to
/// [`crate::discrete::rcm_run`] on g.
pub fn rcm_comp_run(f: &CompositeObjective, x0: &DVector<f64>, cfg: &RcmConfig) -> Result<Trace> {
    check(f, x0, "h", cfg.h)?;
    let value = |x: &DVector<f64>| f.value(x);
    let direction = |x: &DVector<f64>| f.minimal_norm_subgradient(x);
    let problem = ConservativeProblem {
        value: &value,
        direction: &direction,
        project_crossings: f.l1_weight() > 0.0,
    };
    Ok(conservative_loop(&problem, x0, cfg, format!("rcm-comp-{}", cfg.criterion.tag())))
}

struct AcceleratedProblem<'a> {
    value: &'a dyn Fn(&DVector<f64>) -> f64,
    gradient: &'a dyn Fn(&DVector<f64>) -> DVector<f64>,
    residual: &'a dyn Fn(&DVector<f64>) -> DVector<f64>,
    prox: &'a dyn Fn(&DVector<f64>) -> DVector<f64>,
}

/// y₁ = x₀, t₁ = 1; x_k = prox(y_k − s∇g(y_k)); t_{k+1} = (1 + √(1 + 4t_k²))/2;
/// y_{k+1} = x_k + ((t_k − 1)/t_{k+1})(x_k − x_{k−1}).
///
/// With `restart`, (y_k − x_k)·(x_k − x_{k−1}) > 0 resets t_k to 1, which
/// makes y_{k+1} = x_k.
fn accelerated(p: &AcceleratedProblem<'_>, x0: &DVector<f64>, s: f64, max_iter: usize, restart: bool, method: &str) -> Trace {
    let mut trace = Trace::start(method, s, x0, (p.value)(x0), (p.residual)(x0).norm());
    let mut x_prev = x0.clone();
    let mut y = x0.clone();
    let mut t = 1.0f64;
    for k in 1..=max_iter {
        let x = (p.prox)(&(&y - (p.gradient)(&y) * s));
        let step = &x - &x_prev;
        let fired = restart && (&y - &x).dot(&step) > 0.0;
        if fired {
            t = 1.0;
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        y = &x + &step * ((t - 1.0) / t_next);
        t = t_next;
        let ok = trace.push(k, (p.value)(&x), (p.residual)(&x).norm(), fired, false);
        x_prev = x;
        if !ok {
            break;
        }
    }
    trace.x = x_prev;
    trace
}

fn fista_impl(f: &CompositeObjective, x0: &DVector<f64>, s: f64, max_iter: usize, restart: bool) -> Result<Trace> {
    check(f, x0, "s", s)?;
    if s * f.smooth().lipschitz() > 1.0 + 1e-12 {
        log::warn!("s = {s} exceeds 1/L of the smooth part");
    }
    let gamma = f.l1_weight();
    let value = |x: &DVector<f64>| f.value(x);
    let gradient = |x: &DVector<f64>| f.smooth().gradient(x);
    let residual = |x: &DVector<f64>| f.minimal_norm_subgradient(x);
    let prox = |z: &DVector<f64>| prox_l1(z, s * gamma);
    let p = AcceleratedProblem { value: &value, gradient: &gradient, residual: &residual, prox: &prox };
    Ok(accelerated(&p, x0, s, max_iter, restart, if restart { "fista-restart" } else { "fista" }))
}

/// FISTA for g + γ‖·‖₁ with constant step s ≤ 1/L.
pub fn fista_run(f: &CompositeObjective, x0: &DVector<f64>, s: f64, max_iter: usize) -> Result<Trace> {
    fista_impl(f, x0, s, max_iter, false)
}

/// FISTA with the O'Donoghue–Candès gradient restart.
pub fn fista_restart_run(f: &CompositeObjective, x0: &DVector<f64>, s: f64, max_iter: usize) -> Result<Trace> {
    fista_impl(f, x0, s, max_iter, true)
}

/// Accelerated gradient with the FISTA momentum sequence on a smooth
/// objective; the γ = 0 specialization of [`fista_run`].
pub fn agd_run(obj: &dyn SmoothObjective, x0: &DVector<f64>, s: f64, max_iter: usize) -> Result<Trace> {
    if x0.len() != obj.dim() {
        return Err(Error::DimensionMismatch { expected: obj.dim(), found: x0.len() });
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("s must be positive and finite, got {s}")));
    }
    let value = |x: &DVector<f64>| obj.value(x);
    let gradient = |x: &DVector<f64>| obj.gradient(x);
    let prox = |z: &DVector<f64>| z.clone();
    let p = AcceleratedProblem { value: &value, gradient: &gradient, residual: &gradient, prox: &prox };
    Ok(accelerated(&p, x0, s, max_iter, false, "agd"))
}
