//! Numerical checks of the continuous-time estimates, reported as
//! `{bound_name, lhs, rhs, slack, pass}` rows with pass = lhs ≤ rhs + slack.

use nalgebra::DVector;
use serde::Serialize;

use super::{restart_time_bound, restart_time_lower_bound, verlet_step, ContinuousTrajectory, PhasePoint, RestartEvent};
use crate::error::{Error, Result};
use crate::objectives::SmoothObjective;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub bound_name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(bound_name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        let pass = lhs <= rhs + slack;
        Self { bound_name: bound_name.into(), lhs, rhs, slack, pass }
    }

    /// rhs + slack − lhs; negative on violation.
    pub fn margin(&self) -> f64 {
        self.rhs + self.slack - self.lhs
    }
}

/// √μ/(8L) ≤ t_a ≤ 32L/(μ√μ), slack relative to each side.
pub fn mmd_time_bounds(event: &RestartEvent, mu: f64, lipschitz: f64, rel_slack: f64) -> Vec<BoundCheck> {
    let lower = restart_time_lower_bound(mu, lipschitz);
    let upper = restart_time_bound(mu, lipschitz);
    vec![
        BoundCheck::new("restart_time_lower", lower, event.time, rel_slack * lower),
        BoundCheck::new("restart_time_upper", event.time, upper, rel_slack * upper),
    ]
}

/// E_K(t_a) ≥ |∇f(x(t_a))|²/(2L).
pub fn kinetic_energy_at_restart_check(event: &RestartEvent, lipschitz: f64) -> BoundCheck {
    let lhs = event.grad_norm * event.grad_norm / (2.0 * lipschitz);
    let slack = 10.0 * event.energy_drift + 1e-12 * event.kinetic.abs();
    BoundCheck::new("kinetic_energy_at_restart", lhs, event.kinetic, slack)
}

/// ⅛|∇f(x0)|²t² ≤ E_K(t) ≤ (25/32)|∇f(x0)|²t² on the integrator grid of
/// (0, √μ/(2L)]. Returns the worst row of each side; empty if x0 is
/// stationary.
pub fn small_time_energy_check(obj: &dyn SmoothObjective, x0: &DVector<f64>, dt: f64) -> Result<Vec<BoundCheck>> {
    let mu = obj
        .strong_convexity()
        .ok_or_else(|| Error::InvalidParameter("the small-time estimate needs a strong convexity constant".into()))?;
    let lipschitz = obj.lipschitz();
    let horizon = restart_time_lower_bound(mu, lipschitz) * 4.0;
    let mut p = PhasePoint::at_rest(obj, x0.clone());
    let g2 = p.g.norm_squared();
    if g2 == 0.0 {
        log::info!("small-time energy check skipped: x0 is stationary");
        return Ok(Vec::new());
    }
    let dt = dt.min(horizon / 50.0);
    let steps = (horizon / dt).floor() as usize;
    let mut lower: Option<BoundCheck> = None;
    let mut upper: Option<BoundCheck> = None;
    for k in 1..=steps {
        p = verlet_step(obj, &p, dt);
        let t = k as f64 * dt;
        let ek = p.kinetic();
        let scale = g2 * t * t;
        let slack = 1e-6 * scale;
        let lo = BoundCheck::new("kinetic_small_time_lower", scale / 8.0, ek, slack);
        let up = BoundCheck::new("kinetic_small_time_upper", ek, 25.0 / 32.0 * scale, slack);
        if lower.as_ref().is_none_or(|c| lo.margin() / scale < c.margin() / (8.0 * c.lhs)) {
            lower = Some(lo);
        }
        if upper.as_ref().is_none_or(|c| up.margin() / scale < c.margin() / (32.0 / 25.0 * c.rhs)) {
            upper = Some(up);
        }
    }
    Ok(lower.into_iter().chain(upper).collect())
}

/// (t₁/E_K(t₁))·(f(x0) − f*): the mean dissipation cannot keep growing
/// past this time, since E_K stays below f(x0) − f*.
pub fn finite_restart_cap(obj: &dyn SmoothObjective, x0: &DVector<f64>, t1: f64, ek_t1: f64, f_star: f64) -> Result<f64> {
    if !(ek_t1 > 0.0) {
        return Err(Error::Degenerate(format!("kinetic energy at t1 = {t1} is {ek_t1}")));
    }
    Ok(t1 / ek_t1 * (obj.value(x0) - f_star).max(0.0))
}

/// Global contraction at every sample (worst sample reported), per-restart
/// decrease at every event, and the total length bound.
pub fn piecewise_bound_checks(traj: &ContinuousTrajectory, f_star: f64, mu: f64, lipschitz: f64) -> Vec<BoundCheck> {
    let mut out = Vec::new();
    let Some(&f0) = traj.values.first() else { return out };
    let gap0 = f0 - f_star;
    let t_r = restart_time_bound(mu, lipschitz);
    let q = 1.0 / (1.0 + mu / lipschitz);
    let slack = 10.0 * traj.energy_drift + 1e-12 * (1.0 + f_star.abs() + f0.abs());

    let mut worst: Option<BoundCheck> = None;
    for (&t, &f) in traj.times.iter().zip(&traj.values) {
        let rhs = q.powi((t / t_r).floor() as i32) * gap0;
        let c = BoundCheck::new("global_contraction", f - f_star, rhs, slack);
        if worst.as_ref().is_none_or(|w| c.margin() < w.margin()) {
            worst = Some(c);
        }
    }
    out.extend(worst);

    let mut prev_gap = gap0;
    for (k, e) in traj.events.iter().enumerate() {
        let gap = e.value - f_star;
        out.push(BoundCheck::new(format!("decrease_per_restart[{}]", k + 1), gap, q * prev_gap, slack));
        prev_gap = gap;
    }

    let bound = 4.0 * 2f64.sqrt() * (lipschitz / mu) * t_r * gap0.max(0.0).sqrt();
    out.push(BoundCheck::new("curve_length", traj.total_length(), bound, 1e-9 * bound));
    out
}
