//! Conservative flow ẍ = −∇f(x) with restarts.
//!
//! Trajectories are produced by fixed-step Störmer–Verlet; the analysis is
//! about the exact flow, so `dt` only controls accuracy and every bound
//! check carries an explicit slack.

mod checks;
mod closed_form;
mod events;
mod quadrature;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::objectives::SmoothObjective;

pub use checks::{
    finite_restart_cap, kinetic_energy_at_restart_check, mmd_time_bounds, piecewise_bound_checks, small_time_energy_check,
    BoundCheck,
};
pub use closed_form::{
    mean_dissipation, mean_dissipation_slope_at_zero, quadratic_closed_form, quadratic_fixed_interval_decrease,
    ClosedFormState, FixedIntervalDecrease,
};
pub use events::{
    kinetic_max_restart_time, kinetic_maxima, mmd_restart_time, run_piecewise_conservative, FlowOptions, KineticMaximum,
    KineticOutcome, RestartEvent,
};
pub use quadrature::{gauss_kronrod_adaptive, visiting_time_1d};

/// T_R = 32·L/(μ√μ), the uniform bound on the mean-dissipation restart time.
pub fn restart_time_bound(mu: f64, lipschitz: f64) -> f64 {
    32.0 * lipschitz / (mu * mu.sqrt())
}

/// √μ/(8L), the uniform lower bound on the mean-dissipation restart time.
pub fn restart_time_lower_bound(mu: f64, lipschitz: f64) -> f64 {
    mu.sqrt() / (8.0 * lipschitz)
}

/// Densely sampled flow; restarts set the velocity to zero.
#[derive(Debug, Clone, Default)]
pub struct ContinuousTrajectory {
    pub times: Vec<f64>,
    pub positions: Vec<DVector<f64>>,
    pub velocities: Vec<DVector<f64>>,
    /// f at each sample.
    pub values: Vec<f64>,
    pub events: Vec<RestartEvent>,
    /// max |H(t) − H(segment start)| over all samples.
    pub energy_drift: f64,
}

impl ContinuousTrajectory {
    fn push(&mut self, t: f64, x: DVector<f64>, v: DVector<f64>, value: f64) {
        self.times.push(t);
        self.positions.push(x);
        self.velocities.push(v);
        self.values.push(value);
    }

    pub fn total_length(&self) -> f64 {
        self.events.iter().map(|e| e.arc_length).sum()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Position, velocity and gradient at one instant.
#[derive(Debug, Clone)]
pub(crate) struct PhasePoint {
    pub x: DVector<f64>,
    pub v: DVector<f64>,
    pub g: DVector<f64>,
}

impl PhasePoint {
    pub fn at_rest(obj: &dyn SmoothObjective, x: DVector<f64>) -> Self {
        let g = obj.gradient(&x);
        let v = DVector::zeros(x.len());
        Self { x, v, g }
    }

    pub fn kinetic(&self) -> f64 {
        0.5 * self.v.norm_squared()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.v.iter()).chain(self.g.iter()).all(|c| c.is_finite())
    }
}

/// Velocity-Verlet form of Störmer–Verlet; one gradient evaluation per step.
pub(crate) fn verlet_step(obj: &dyn SmoothObjective, p: &PhasePoint, dt: f64) -> PhasePoint {
    let v_half = &p.v - &p.g * (0.5 * dt);
    let x = &p.x + &v_half * dt;
    let g = obj.gradient(&x);
    let v = &v_half - &g * (0.5 * dt);
    PhasePoint { x, v, g }
}

/// Fixed-step Störmer–Verlet from (x0, v0) over [0, T]; the last step ends
/// at the first grid time ≥ T. Reports the mechanical-energy drift.
pub fn integrate_conservative(
    obj: &dyn SmoothObjective,
    x0: &DVector<f64>,
    v0: &DVector<f64>,
    dt: f64,
    horizon: f64,
) -> Result<ContinuousTrajectory> {
    if x0.len() != obj.dim() || v0.len() != obj.dim() {
        return Err(Error::DimensionMismatch { expected: obj.dim(), found: x0.len().max(v0.len()) });
    }
    if !(dt > 0.0 && horizon > dt) {
        return Err(Error::InvalidParameter(format!("need 0 < dt < T, got dt = {dt}, T = {horizon}")));
    }
    let steps = (horizon / dt - 1e-9).ceil() as usize;
    let mut p = PhasePoint { x: x0.clone(), v: v0.clone(), g: obj.gradient(x0) };
    let mut traj = ContinuousTrajectory::default();
    let f0 = obj.value(&p.x);
    let h0 = f0 + p.kinetic();
    traj.push(0.0, p.x.clone(), p.v.clone(), f0);
    for k in 1..=steps {
        p = verlet_step(obj, &p, dt);
        let t = k as f64 * dt;
        if !p.is_finite() {
            return Err(Error::NonFinite { t });
        }
        let f = obj.value(&p.x);
        traj.energy_drift = traj.energy_drift.max((f + p.kinetic() - h0).abs());
        traj.push(t, p.x.clone(), p.v.clone(), f);
    }
    Ok(traj)
}
