//! Restart-event detection along the conservative flow.
//!
//! Both detectors integrate from rest with Störmer–Verlet, bracket the first
//! sign change of an indicator between two grid points, and refine it by
//! bisection on cubic Hermite interpolants of (x, v) built from the step
//! endpoints (the derivatives are v and −∇f, both known exactly there).

use nalgebra::DVector;
use serde::Serialize;

use super::{restart_time_bound, verlet_step, ContinuousTrajectory, PhasePoint};
use crate::error::{Error, Result};
use crate::objectives::SmoothObjective;

/// Relative time tolerance of the bisection refinement.
const EVENT_TIME_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub dt: f64,
    /// Explicit time cap; derived from μ or f* when absent.
    pub cap: Option<f64>,
    /// Minimum value, used for the cap of non-strongly-convex inputs.
    pub f_star: Option<f64>,
}

impl FlowOptions {
    /// dt = 1e-3/√L.
    pub fn for_objective(obj: &dyn SmoothObjective) -> Self {
        Self { dt: 1e-3 / obj.lipschitz().sqrt(), cap: None, f_star: None }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn with_f_star(mut self, f_star: f64) -> Self {
        self.f_star = Some(f_star);
        self
    }
}

/// A restart instant, measured from the start of its segment.
#[derive(Debug, Clone, Serialize)]
pub struct RestartEvent {
    /// Segment-relative restart time t_a.
    pub time: f64,
    /// E_K(t_a).
    pub kinetic: f64,
    /// f(x(t_a)).
    pub value: f64,
    /// f at the start of the segment.
    pub start_value: f64,
    /// |∇f(x(t_a))|.
    pub grad_norm: f64,
    /// ∫|ẋ| over the segment.
    pub arc_length: f64,
    /// max |H(t) − H(0)| over the segment.
    pub energy_drift: f64,
    #[serde(skip)]
    pub x: DVector<f64>,
}

#[derive(Debug, Clone)]
pub enum KineticOutcome {
    Maximum(RestartEvent),
    /// E_K had no local maximum before the cap.
    NoMaxWithinCap { cap: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Detector {
    /// t·Ė_K − E_K < 0: the mean dissipation E_K/t stopped growing.
    MeanDissipation,
    /// ∇f·v ≥ 0 after being negative: E_K stopped growing.
    KineticMax,
}

impl Detector {
    fn indicator(self, t: f64, p: &PhasePoint) -> f64 {
        match self {
            Detector::MeanDissipation => -t * p.g.dot(&p.v) - p.kinetic(),
            Detector::KineticMax => p.g.dot(&p.v),
        }
    }

    fn fired(self, indicator: f64) -> bool {
        match self {
            Detector::MeanDissipation => indicator < 0.0,
            Detector::KineticMax => indicator >= 0.0,
        }
    }
}

/// Cubic Hermite interpolation of the step a → b at fraction θ.
fn interpolate(obj: &dyn SmoothObjective, a: &PhasePoint, b: &PhasePoint, dt: f64, theta: f64) -> PhasePoint {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let x = &a.x * h00 + &a.v * (h10 * dt) + &b.x * h01 + &b.v * (h11 * dt);
    let v = &a.v * h00 - &a.g * (h10 * dt) + &b.v * h01 - &b.g * (h11 * dt);
    let g = obj.gradient(&x);
    PhasePoint { x, v, g }
}

/// Bisection for the first fired point inside the step a → b, where the
/// detector is quiet at a and fired at b. Returns (θ, state).
fn refine(obj: &dyn SmoothObjective, det: Detector, a: &PhasePoint, b: &PhasePoint, t_a: f64, dt: f64) -> (f64, PhasePoint) {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let tol = EVENT_TIME_TOL * (t_a + dt) / dt;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let p = interpolate(obj, a, b, dt, mid);
        if det.fired(det.indicator(t_a + mid * dt, &p)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    (theta, interpolate(obj, a, b, dt, theta))
}

enum SegmentEnd {
    Event(RestartEvent),
    Cap(f64),
}

enum CapRule {
    Fixed(f64),
    /// 1.1·(t₁/E_K(t₁))·(f(x0) − f*) + 2dt, fixed after the first step.
    FromFirstStep { f_star: f64 },
}

fn cap_rule(obj: &dyn SmoothObjective, opts: &FlowOptions) -> Result<CapRule> {
    if let Some(cap) = opts.cap {
        return Ok(CapRule::Fixed(cap));
    }
    if let Some(mu) = obj.strong_convexity() {
        return Ok(CapRule::Fixed(2.0 * restart_time_bound(mu, obj.lipschitz())));
    }
    if let Some(f_star) = opts.f_star {
        return Ok(CapRule::FromFirstStep { f_star });
    }
    Err(Error::InvalidParameter("a time cap needs an explicit cap, a strong convexity constant or f*".into()))
}

/// Integrates one segment from rest at `x_start` until the detector fires.
/// Grid samples before the event are appended to `record` with times offset
/// by `t_offset`.
fn integrate_segment(
    obj: &dyn SmoothObjective,
    x_start: &DVector<f64>,
    opts: &FlowOptions,
    det: Detector,
    mut record: Option<&mut ContinuousTrajectory>,
    t_offset: f64,
) -> Result<SegmentEnd> {
    let dt = opts.dt;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let rule = cap_rule(obj, opts)?;
    let start = PhasePoint::at_rest(obj, x_start.clone());
    let f_start = obj.value(&start.x);
    let mut cap = match rule {
        CapRule::Fixed(c) => c,
        CapRule::FromFirstStep { .. } => f64::INFINITY,
    };

    let mut prev = start;
    let mut t_prev = 0.0;
    let mut drift: f64 = 0.0;
    let mut length = 0.0;
    let mut armed = false;
    if let Some(rec) = record.as_deref_mut() {
        rec.push(t_offset, prev.x.clone(), prev.v.clone(), f_start);
    }

    let mut step = 0usize;
    loop {
        step += 1;
        let t = step as f64 * dt;
        let cur = verlet_step(obj, &prev, dt);
        if !cur.is_finite() {
            return Err(Error::NonFinite { t: t_offset + t });
        }
        if step == 1 {
            if let CapRule::FromFirstStep { f_star } = rule {
                cap = 1.1 * super::finite_restart_cap(obj, x_start, t, cur.kinetic(), f_star)? + 2.0 * dt;
            }
        }
        let indicator = det.indicator(t, &cur);
        let fire = det.fired(indicator) && (det == Detector::MeanDissipation || armed);
        if det == Detector::KineticMax && indicator < 0.0 {
            armed = true;
        }

        if fire {
            let (theta, p) = refine(obj, det, &prev, &cur, t_prev, dt);
            let time = t_prev + theta * dt;
            let value = obj.value(&p.x);
            drift = drift.max((value + p.kinetic() - f_start).abs());
            length += 0.5 * (prev.v.norm() + p.v.norm()) * theta * dt;
            if let Some(rec) = record.as_deref_mut() {
                rec.energy_drift = rec.energy_drift.max(drift);
            }
            return Ok(SegmentEnd::Event(RestartEvent {
                time,
                kinetic: p.kinetic(),
                value,
                start_value: f_start,
                grad_norm: p.g.norm(),
                arc_length: length,
                energy_drift: drift,
                x: p.x,
            }));
        }

        let value = obj.value(&cur.x);
        drift = drift.max((value + cur.kinetic() - f_start).abs());
        length += 0.5 * (prev.v.norm() + cur.v.norm()) * dt;
        if let Some(rec) = record.as_deref_mut() {
            rec.push(t_offset + t, cur.x.clone(), cur.v.clone(), value);
            rec.energy_drift = rec.energy_drift.max(drift);
        }
        if t >= cap {
            return Ok(SegmentEnd::Cap(cap));
        }
        prev = cur;
        t_prev = t;
    }
}

fn require_motion(obj: &dyn SmoothObjective, x0: &DVector<f64>) -> Result<()> {
    if x0.len() != obj.dim() {
        return Err(Error::DimensionMismatch { expected: obj.dim(), found: x0.len() });
    }
    if obj.gradient(x0).norm() == 0.0 {
        return Err(Error::Degenerate("zero gradient at the starting point: the flow is stationary".into()));
    }
    Ok(())
}

/// First time t_a after a start from rest where t·Ė_K(t) − E_K(t) < 0, i.e.
/// where the mean dissipation E_K(t)/t stops increasing.
pub fn mmd_restart_time(obj: &dyn SmoothObjective, x0: &DVector<f64>, opts: &FlowOptions) -> Result<RestartEvent> {
    require_motion(obj, x0)?;
    match integrate_segment(obj, x0, opts, Detector::MeanDissipation, None, 0.0)? {
        SegmentEnd::Event(e) => Ok(e),
        SegmentEnd::Cap(cap) => Err(Error::RestartCap { cap }),
    }
}

/// First local maximum of the kinetic energy after a start from rest. Its
/// absence before the cap is a legitimate outcome in dimension > 1.
pub fn kinetic_max_restart_time(obj: &dyn SmoothObjective, x0: &DVector<f64>, opts: &FlowOptions) -> Result<KineticOutcome> {
    require_motion(obj, x0)?;
    Ok(match integrate_segment(obj, x0, opts, Detector::KineticMax, None, 0.0)? {
        SegmentEnd::Event(e) => KineticOutcome::Maximum(e),
        SegmentEnd::Cap(cap) => KineticOutcome::NoMaxWithinCap { cap },
    })
}

/// Evolution–restart curve: each segment starts from rest and ends at the
/// first local maximum of its own mean dissipation. Stops early if it lands
/// on a stationary point.
pub fn run_piecewise_conservative(
    obj: &dyn SmoothObjective,
    x0: &DVector<f64>,
    opts: &FlowOptions,
    n_restarts: usize,
) -> Result<ContinuousTrajectory> {
    if x0.len() != obj.dim() {
        return Err(Error::DimensionMismatch { expected: obj.dim(), found: x0.len() });
    }
    let mut traj = ContinuousTrajectory::default();
    let mut x = x0.clone();
    let mut t = 0.0;
    for _ in 0..n_restarts {
        if obj.gradient(&x).norm() == 0.0 {
            break;
        }
        match integrate_segment(obj, &x, opts, Detector::MeanDissipation, Some(&mut traj), t)? {
            SegmentEnd::Event(event) => {
                t += event.time;
                x = event.x.clone();
                traj.events.push(event);
            }
            SegmentEnd::Cap(cap) => return Err(Error::RestartCap { cap }),
        }
    }
    let value = obj.value(&x);
    let n = x.len();
    traj.push(t, x, DVector::zeros(n), value);
    Ok(traj)
}

/// A local maximum t̄ of E_K together with t̄·Ė_K(t̄) − E_K(t̄).
#[derive(Debug, Clone, Serialize)]
pub struct KineticMaximum {
    pub time: f64,
    pub kinetic: f64,
    pub dissipation_numerator: f64,
    #[serde(skip)]
    pub x: DVector<f64>,
}

/// Every local maximum of the kinetic energy on [0, horizon] for the flow
/// from rest at x0.
pub fn kinetic_maxima(obj: &dyn SmoothObjective, x0: &DVector<f64>, dt: f64, horizon: f64) -> Result<Vec<KineticMaximum>> {
    require_motion(obj, x0)?;
    if !(dt > 0.0 && horizon > dt) {
        return Err(Error::InvalidParameter(format!("need 0 < dt < T, got dt = {dt}, T = {horizon}")));
    }
    let det = Detector::KineticMax;
    let mut found = Vec::new();
    let mut prev = PhasePoint::at_rest(obj, x0.clone());
    let mut prev_ind = 0.0;
    let steps = (horizon / dt).ceil() as usize;
    for k in 1..=steps {
        let t = k as f64 * dt;
        let cur = verlet_step(obj, &prev, dt);
        if !cur.is_finite() {
            return Err(Error::NonFinite { t });
        }
        let ind = det.indicator(t, &cur);
        if prev_ind < 0.0 && ind >= 0.0 {
            let t_prev = t - dt;
            let (theta, p) = refine(obj, det, &prev, &cur, t_prev, dt);
            let time = t_prev + theta * dt;
            let kinetic = p.kinetic();
            let ek_dot = -p.g.dot(&p.v);
            found.push(KineticMaximum { time, kinetic, dissipation_numerator: time * ek_dot - kinetic, x: p.x });
        }
        prev_ind = ind;
        prev = cur;
    }
    Ok(found)
}
