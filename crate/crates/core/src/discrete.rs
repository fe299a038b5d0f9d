//! Discrete restart-conservative methods and the smooth baselines.
//!
//! The conservative iteration is the symplectic Euler scheme for ẍ = −∇f,
//!
//! ```text
//! v_{k+1} = v_k − h∇f(x_k),   x_{k+1} = x_k + h·v_{k+1},
//! ```
//!
//! i.e. a gradient step of size h² plus the momentum h·v_k. Each method
//! differs only in the test deciding when to throw the momentum away and
//! restart from rest.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::composite::sign_crossing_projection;
use crate::error::{Error, Result};
use crate::objectives::SmoothObjective;
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RestartCriterion {
    /// Restart when the gradient at the trial point makes an acute angle with
    /// the pre-step velocity.
    #[serde(rename = "grad")]
    Grad,
    /// Restart when the kinetic energy decreases.
    #[serde(rename = "kin")]
    Kin,
    /// Restart when the mean dissipation |v|²/(k − l) decreases.
    #[serde(rename = "mmd-r")]
    MmdR,
    /// Restart when the discrete derivative of the mean dissipation turns negative.
    #[serde(rename = "mmd-dr")]
    MmdDr,
}

impl RestartCriterion {
    pub const ALL: [RestartCriterion; 4] = [Self::Grad, Self::Kin, Self::MmdR, Self::MmdDr];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Grad => "grad",
            Self::Kin => "kin",
            Self::MmdR => "mmd-r",
            Self::MmdDr => "mmd-dr",
        }
    }
}

impl std::str::FromStr for RestartCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown restart criterion {s:?}")))
    }
}

/// Where the gradient used for the restart velocity is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GradPoint {
    /// v = −h∇f(x_k), x_{k+1} = x_k − h²∇f(x_k): one symplectic step from rest.
    #[default]
    Old,
    /// Literal listing order: move first, then v = −h∇f(x_{k+1}).
    New,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RcmConfig {
    pub h: f64,
    pub criterion: RestartCriterion,
    pub max_iter: usize,
    pub restart_grad_at: GradPoint,
    /// Composite runs only: treat a sign-crossing velocity reset as the start
    /// of a new mean-dissipation epoch.
    pub reset_mmd_on_cross: bool,
}

impl RcmConfig {
    pub fn new(h: f64, criterion: RestartCriterion, max_iter: usize) -> Self {
        Self { h, criterion, max_iter, restart_grad_at: GradPoint::Old, reset_mmd_on_cross: true }
    }

    /// h = 1/√L.
    pub fn default_step(lipschitz: f64) -> f64 {
        1.0 / lipschitz.sqrt()
    }
}

/// Iterate, velocity and restart bookkeeping of a conservative run.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteState {
    pub x: DVector<f64>,
    pub v: DVector<f64>,
    pub iter: usize,
    /// Index of the most recent restart (0 initially).
    pub last_restart: usize,
}

fn step_with_direction(x: &DVector<f64>, v: &DVector<f64>, d: &DVector<f64>, h: f64) -> (DVector<f64>, DVector<f64>) {
    let v_next = v - d * h;
    let x_next = x + &v_next * h;
    (x_next, v_next)
}

/// One symplectic Euler step: v' = v − h∇f(x), x' = x + h·v'.
pub fn symplectic_euler_step(
    obj: &dyn SmoothObjective,
    x: &DVector<f64>,
    v: &DVector<f64>,
    h: f64,
) -> (DVector<f64>, DVector<f64>) {
    step_with_direction(x, v, &obj.gradient(x), h)
}

/// A symplectic step from rest: v' = −h∇f(x), x' = x − h²∇f(x).
pub fn rest_restart_step(obj: &dyn SmoothObjective, x: &DVector<f64>, h: f64) -> (DVector<f64>, DVector<f64>) {
    symplectic_euler_step(obj, x, &DVector::zeros(x.len()), h)
}

/// Restart test for the transition (x_k, v_k) → (x_{k+1}, v_{k+1}).
///
/// `v` is the pre-step velocity, `v_new` the trial velocity and `grad_new` the
/// gradient (or minimal-norm subgradient) at the trial point. `l` is the index
/// of the last restart. All comparisons are strict.
pub fn should_restart(
    criterion: RestartCriterion,
    v: &DVector<f64>,
    v_new: &DVector<f64>,
    grad_new: &DVector<f64>,
    k: usize,
    l: usize,
) -> bool {
    match criterion {
        RestartCriterion::Grad => grad_new.dot(v) > 0.0,
        RestartCriterion::Kin => v_new.norm_squared() < v.norm_squared(),
        RestartCriterion::MmdR => {
            assert!(k > l, "mean-dissipation ratio queried with k = {k}, l = {l}");
            v_new.norm_squared() / ((k + 1 - l) as f64) < v.norm_squared() / ((k - l) as f64)
        }
        RestartCriterion::MmdDr => {
            assert!(k >= l, "mean-dissipation derivative queried with k = {k}, l = {l}");
            v_new.norm_squared() + 2.0 * (k + 1 - l) as f64 * grad_new.dot(v_new) > 0.0
        }
    }
}

/// Everything the restart-conservative loop needs from an objective.
pub(crate) struct ConservativeProblem<'a> {
    pub value: &'a dyn Fn(&DVector<f64>) -> f64,
    /// ∇f for smooth problems, ∂⁻f for composite ones.
    pub direction: &'a dyn Fn(&DVector<f64>) -> DVector<f64>,
    /// Zero coordinates that change sign and drop the velocity.
    pub project_crossings: bool,
}

pub(crate) fn conservative_loop(problem: &ConservativeProblem<'_>, x0: &DVector<f64>, cfg: &RcmConfig, method: String) -> Trace {
    let h = cfg.h;
    let mut state = DiscreteState { x: x0.clone(), v: DVector::zeros(x0.len()), iter: 0, last_restart: 0 };
    let mut d = (problem.direction)(&state.x);
    let mut trace = Trace::start(method, h, x0, (problem.value)(&state.x), d.norm());
    if trace.status != crate::trace::RunStatus::Completed {
        return trace;
    }

    for k in 0..cfg.max_iter {
        let (x_trial, v_trial) = step_with_direction(&state.x, &state.v, &d, h);
        let d_trial = (problem.direction)(&x_trial);
        // the first step starts from rest, so there is nothing to compare yet
        let restart = k > 0 && should_restart(cfg.criterion, &state.v, &v_trial, &d_trial, k, state.last_restart);

        let (mut x_next, mut v_next, mut d_next) = if restart {
            state.last_restart = k;
            match cfg.restart_grad_at {
                GradPoint::Old => {
                    let (x, v) = step_with_direction(&state.x, &DVector::zeros(x0.len()), &d, h);
                    let dn = (problem.direction)(&x);
                    (x, v, dn)
                }
                GradPoint::New => {
                    let (x, _) = step_with_direction(&state.x, &DVector::zeros(x0.len()), &d, h);
                    let dn = (problem.direction)(&x);
                    let v = &dn * (-h);
                    (x, v, dn)
                }
            }
        } else {
            (x_trial, v_trial, d_trial)
        };

        let mut crossed = false;
        if problem.project_crossings {
            let (projected, any) = sign_crossing_projection(&state.x, &x_next);
            if any {
                crossed = true;
                x_next = projected;
                v_next.fill(0.0);
                d_next = (problem.direction)(&x_next);
                if cfg.reset_mmd_on_cross {
                    state.last_restart = k;
                }
            }
        }

        state.x = x_next;
        state.v = v_next;
        state.iter = k + 1;
        d = d_next;
        let ok = trace.push(k + 1, (problem.value)(&state.x), d.norm(), restart, crossed);
        if !ok {
            break;
        }
    }
    trace.x = state.x;
    trace
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {value}")))
    }
}

fn check_start(obj: &dyn SmoothObjective, x0: &DVector<f64>) -> Result<()> {
    if x0.len() != obj.dim() {
        return Err(Error::DimensionMismatch { expected: obj.dim(), found: x0.len() });
    }
    Ok(())
}

/// Restart-conservative method on a smooth objective.
///
/// Iteration 1 is a step from rest at x0; from then on every trial
/// symplectic step is checked against `cfg.criterion` and replaced by a
/// step from rest when the test fires.
pub fn rcm_run(obj: &dyn SmoothObjective, x0: &DVector<f64>, cfg: &RcmConfig) -> Result<Trace> {
    check_start(obj, x0)?;
    check_positive("h", cfg.h)?;
    if cfg.h * cfg.h * obj.lipschitz() >= 2.0 {
        log::warn!("h = {} is outside (0, sqrt(2/L)); descent is not guaranteed", cfg.h);
    }
    let value = |x: &DVector<f64>| obj.value(x);
    let direction = |x: &DVector<f64>| obj.gradient(x);
    let problem = ConservativeProblem { value: &value, direction: &direction, project_crossings: false };
    Ok(conservative_loop(&problem, x0, cfg, format!("rcm-{}", cfg.criterion.tag())))
}

/// x_{k+1} = x_k − s∇f(x_k).
pub fn gradient_descent_run(obj: &dyn SmoothObjective, x0: &DVector<f64>, s: f64, max_iter: usize) -> Result<Trace> {
    check_start(obj, x0)?;
    check_positive("s", s)?;
    let mut x = x0.clone();
    let mut g = obj.gradient(&x);
    let mut trace = Trace::start("gd", s, x0, obj.value(&x), g.norm());
    for k in 1..=max_iter {
        x -= &g * s;
        g = obj.gradient(&x);
        if !trace.push(k, obj.value(&x), g.norm(), false, false) {
            break;
        }
    }
    trace.x = x;
    Ok(trace)
}

enum Momentum {
    /// k/(k+3) with the counter reset on gradient restarts when `restart`.
    Convex { restart: bool },
    Constant(f64),
}

fn nesterov(obj: &dyn SmoothObjective, x0: &DVector<f64>, s: f64, max_iter: usize, momentum: Momentum, method: &str) -> Trace {
    let mut x = x0.clone();
    let mut y_prev = x0.clone();
    let mut g = obj.gradient(&x);
    let mut trace = Trace::start(method, s, x0, obj.value(&x), g.norm());
    let mut counter = 0usize;
    for k in 1..=max_iter {
        let y = &x - &g * s;
        let beta = match momentum {
            Momentum::Convex { .. } => counter as f64 / (counter as f64 + 3.0),
            Momentum::Constant(beta) => beta,
        };
        let step = &y - &y_prev;
        x = &y + &step * beta;
        g = obj.gradient(&x);
        let mut restart = false;
        if let Momentum::Convex { restart: true } = momentum {
            if g.dot(&step) > 0.0 {
                restart = true;
                x = y.clone();
                g = obj.gradient(&x);
                counter = 0;
            } else {
                counter += 1;
            }
        } else {
            counter += 1;
        }
        y_prev = y;
        if !trace.push(k, obj.value(&x), g.norm(), restart, false) {
            break;
        }
    }
    trace.x = x;
    trace
}

fn warn_step(obj: &dyn SmoothObjective, s: f64) {
    if s * obj.lipschitz() > 1.0 + 1e-12 {
        log::warn!("s = {s} exceeds 1/L = {}", 1.0 / obj.lipschitz());
    }
}

/// NAG-C: y_{k+1} = x_k − s∇f(x_k), x_{k+1} = y_{k+1} + k/(k+3)·(y_{k+1} − y_k).
pub fn nag_c_run(obj: &dyn SmoothObjective, x0: &DVector<f64>, s: f64, max_iter: usize) -> Result<Trace> {
    check_start(obj, x0)?;
    check_positive("s", s)?;
    warn_step(obj, s);
    Ok(nesterov(obj, x0, s, max_iter, Momentum::Convex { restart: false }, "nag-c"))
}

/// NAG-SC with momentum (1 − √(μs))/(1 + √(μs)); μ is caller-supplied so an
/// underestimate can be benchmarked.
pub fn nag_sc_run(obj: &dyn SmoothObjective, x0: &DVector<f64>, s: f64, mu: f64, max_iter: usize) -> Result<Trace> {
    check_start(obj, x0)?;
    check_positive("s", s)?;
    check_positive("mu", mu)?;
    if mu * s > 1.0 {
        return Err(Error::InvalidParameter(format!("mu*s = {} exceeds 1", mu * s)));
    }
    warn_step(obj, s);
    let r = (mu * s).sqrt();
    Ok(nesterov(obj, x0, s, max_iter, Momentum::Constant((1.0 - r) / (1.0 + r)), "nag-sc"))
}

/// NAG-C with the gradient restart: when ∇f(x_{k+1})·(y_{k+1} − y_k) > 0 the
/// iterate falls back to y_{k+1} and the momentum counter returns to 0.
pub fn nag_c_restart_run(obj: &dyn SmoothObjective, x0: &DVector<f64>, s: f64, max_iter: usize) -> Result<Trace> {
    check_start(obj, x0)?;
    check_positive("s", s)?;
    warn_step(obj, s);
    Ok(nesterov(obj, x0, s, max_iter, Momentum::Convex { restart: true }, "nag-c-restart"))
}
