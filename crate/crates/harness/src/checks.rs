//! Theory-check reports for the `continuous` and `verify` subcommands.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use nalgebra::DVector;
use rcm_core::composite::{agd_run, fista_run, rcm_comp_run};
use rcm_core::continuous::{
    kinetic_energy_at_restart_check, kinetic_max_restart_time, kinetic_maxima, mmd_restart_time, mmd_time_bounds,
    piecewise_bound_checks, quadratic_fixed_interval_decrease, run_piecewise_conservative, small_time_energy_check,
    visiting_time_1d, BoundCheck, FlowOptions, KineticOutcome,
};
use rcm_core::discrete::{rcm_run, rest_restart_step, should_restart, symplectic_euler_step, RcmConfig, RestartCriterion};
use rcm_core::objectives::{
    gen_logistic_instance, gen_logsumexp_instance, gen_random_quadratic, seeded_rng, standard_normal_vector,
    CompositeObjective, FnObjective, LogSumExpObjective, LogisticObjective, QuadraticObjective, SmoothObjective,
};
use serde::Serialize;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ContinuousCheck {
    MmdBounds,
    #[value(name = "kinetic-1d")]
    Kinetic1d,
    ConvCont,
    Length,
    SmallTime,
    QuadDecrease,
    VisitingTime,
}

impl ContinuousCheck {
    pub const ALL: [ContinuousCheck; 7] = [
        ContinuousCheck::MmdBounds,
        ContinuousCheck::Kinetic1d,
        ContinuousCheck::ConvCont,
        ContinuousCheck::Length,
        ContinuousCheck::SmallTime,
        ContinuousCheck::QuadDecrease,
        ContinuousCheck::VisitingTime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ContinuousCheck::MmdBounds => "mmd-bounds",
            ContinuousCheck::Kinetic1d => "kinetic-1d",
            ContinuousCheck::ConvCont => "conv-cont",
            ContinuousCheck::Length => "length",
            ContinuousCheck::SmallTime => "small-time",
            ContinuousCheck::QuadDecrease => "quad-decrease",
            ContinuousCheck::VisitingTime => "visiting-time",
        }
    }
}

/// Test problem of the continuous checks: ½xᵀdiag(λ)x with λ evenly spread
/// over [μ, L], started at (1, …, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousParams {
    pub mu: f64,
    pub lipschitz: f64,
    /// Defaults to 1 when μ = L and 2 otherwise.
    pub n: Option<usize>,
    /// Defaults to 1e-3/√L.
    pub dt: Option<f64>,
    pub restarts: usize,
}

impl Default for ContinuousParams {
    fn default() -> Self {
        Self { mu: 1.0, lipschitz: 1.0, n: None, dt: None, restarts: 10 }
    }
}

impl ContinuousParams {
    fn spectrum(&self) -> Result<Vec<f64>> {
        let (mu, l) = (self.mu, self.lipschitz);
        if !(mu > 0.0 && l >= mu && l.is_finite()) {
            return Err(HarnessError::Config(format!("need 0 < mu <= L, got mu = {mu}, L = {l}")));
        }
        let n = self.n.unwrap_or(if mu == l { 1 } else { 2 });
        match n {
            0 => Err(HarnessError::Config("n must be positive".into())),
            1 if mu != l => Err(HarnessError::Config("n = 1 needs mu = L".into())),
            1 => Ok(vec![mu]),
            _ => Ok((0..n).map(|i| mu + (l - mu) * i as f64 / (n - 1) as f64).collect()),
        }
    }

    fn quadratic(&self) -> Result<(QuadraticObjective, DVector<f64>)> {
        let lambdas = self.spectrum()?;
        let n = lambdas.len();
        Ok((QuadraticObjective::diagonal(&lambdas, DVector::zeros(n))?, DVector::from_element(n, 1.0)))
    }

    fn flow(&self) -> FlowOptions {
        FlowOptions { dt: self.dt.unwrap_or(1e-3 / self.lipschitz.sqrt()), cap: None, f_star: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    /// Named scalar outputs (restart time, bounds, …).
    pub values: BTreeMap<String, f64>,
    pub bounds: Vec<BoundCheck>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, values: BTreeMap<String, f64>, bounds: Vec<BoundCheck>) -> Self {
        let pass = !bounds.is_empty() && bounds.iter().all(|b| b.pass);
        Self { check: check.into(), pass, values, bounds }
    }
}

fn values<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn run_continuous_check(check: ContinuousCheck, p: &ContinuousParams) -> Result<CheckReport> {
    let name = check.name();
    match check {
        ContinuousCheck::MmdBounds => {
            let (q, x0) = p.quadratic()?;
            let e = mmd_restart_time(&q, &x0, &p.flow())?;
            let mut rows = mmd_time_bounds(&e, p.mu, p.lipschitz, 1e-4);
            rows.push(kinetic_energy_at_restart_check(&e, p.lipschitz));
            let vals = values([
                ("t_a", e.time),
                ("lower_bound", rows[0].lhs),
                ("upper_bound", rows[1].rhs),
                ("kinetic_at_restart", e.kinetic),
            ]);
            Ok(CheckReport::new(name, vals, rows))
        }
        ContinuousCheck::Kinetic1d => {
            let mu = p.mu;
            let f = FnObjective::scalar(move |x| 0.5 * mu * x * x, move |x| mu * x, mu, Some(mu));
            let opts = p.flow();
            let out = kinetic_max_restart_time(&f, &DVector::from_element(1, 1.0), &opts)?;
            let KineticOutcome::Maximum(e) = out else {
                return Ok(CheckReport::new(name, BTreeMap::new(), vec![]));
            };
            let quarter = FRAC_PI_2 / mu.sqrt();
            let rows = vec![
                BoundCheck::new("stationary_at_kinetic_max", e.grad_norm, 1e-6, 0.0),
                BoundCheck::new("visiting_time_upper", e.time, quarter, 1e-6),
            ];
            Ok(CheckReport::new(name, values([("t_bar", e.time), ("quarter_period", quarter)]), rows))
        }
        ContinuousCheck::ConvCont | ContinuousCheck::Length => {
            let (q, x0) = p.quadratic()?;
            let traj = run_piecewise_conservative(&q, &x0, &p.flow(), p.restarts)?;
            let all = piecewise_bound_checks(&traj, 0.0, p.mu, p.lipschitz);
            let rows: Vec<_> = all.into_iter().filter(|b| (b.bound_name == "curve_length") == (check == ContinuousCheck::Length)).collect();
            let vals = values([
                ("restarts", traj.events.len() as f64),
                ("final_time", traj.times.last().copied().unwrap_or(0.0)),
                ("final_gap", traj.values.last().copied().unwrap_or(0.0)),
                ("total_length", traj.total_length()),
                ("energy_drift", traj.energy_drift),
            ]);
            Ok(CheckReport::new(name, vals, rows))
        }
        ContinuousCheck::SmallTime => {
            let (q, x0) = p.quadratic()?;
            let rows = small_time_energy_check(&q, &x0, p.flow().dt)?;
            Ok(CheckReport::new(name, values([("grad_norm_sq", q.gradient(&x0).norm_squared())]), rows))
        }
        ContinuousCheck::QuadDecrease => {
            let lambdas = p.spectrum()?;
            let x0 = DVector::from_element(lambdas.len(), 1.0);
            let d = quadratic_fixed_interval_decrease(&lambdas, &x0)?;
            let rows = vec![BoundCheck::new("fixed_interval_decrease", d.ratio, d.bound, 1e-12)];
            Ok(CheckReport::new(name, values([("ratio", d.ratio), ("bound", d.bound)]), rows))
        }
        ContinuousCheck::VisitingTime => {
            let mu = p.mu;
            let t = visiting_time_1d(|x| 0.5 * mu * x * x, |x| mu * x, 1.0, 0.0)?;
            let quarter = FRAC_PI_2 / mu.sqrt();
            let mut rows = vec![BoundCheck::new("quadratic_quarter_period", (t - quarter).abs(), 1e-6, 0.0)];
            for x0 in [0.1, 1.0, 10.0] {
                let tq = visiting_time_1d(|x| 0.25 * x.powi(4), |x| x.powi(3), x0, 0.0)?;
                rows.push(BoundCheck::new(format!("quartic_lower[x0={x0}]"), FRAC_PI_2 / x0, tq, 0.0));
            }
            Ok(CheckReport::new(name, values([("quadratic_time", t), ("quarter_period", quarter)]), rows))
        }
    }
}

/// max over k of |Q_k − Q_0|/|Q_0| for Q = ½v² + ½ax² − ½ahxv along the
/// restart-free symplectic Euler sequence on ½ax².
pub fn conservation_drift(a: f64, h: f64, x0: f64, steps: usize) -> f64 {
    let f = FnObjective::scalar(move |x| 0.5 * a * x * x, move |x| a * x, a, Some(a));
    let q = |x: f64, v: f64| 0.5 * v * v + 0.5 * a * x * x - 0.5 * a * h * x * v;
    let mut x = DVector::from_element(1, x0);
    let mut v = DVector::zeros(1);
    let q0 = q(x0, 0.0);
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        (x, v) = symplectic_euler_step(&f, &x, &v, h);
        worst = worst.max((q(x[0], v[0]) - q0).abs() / q0.abs());
    }
    worst
}

/// Replays RCM-grad step by step and returns the largest
/// f(x_{k+1}) − f(x_k − h²∇f(x_k)) − 1e-12(1 + |f|), together with whether
/// the replay reproduced the library trace exactly.
pub fn gd_dominance_margin(obj: &dyn SmoothObjective, x0: &DVector<f64>, h: f64, iters: usize) -> Result<(f64, bool)> {
    let trace = rcm_run(obj, x0, &RcmConfig::new(h, RestartCriterion::Grad, iters))?;
    let (mut x, mut v) = rest_restart_step(obj, x0, h);
    let mut worst = f64::NEG_INFINITY;
    let mut same = trace.records[1].value == obj.value(&x);
    for k in 1..iters {
        let gd = &x - obj.gradient(&x) * (h * h);
        let (xt, vt) = symplectic_euler_step(obj, &x, &v, h);
        let restart = should_restart(RestartCriterion::Grad, &v, &vt, &obj.gradient(&xt), k, 0);
        (x, v) = if restart { rest_restart_step(obj, &x, h) } else { (xt, vt) };
        let f = obj.value(&x);
        worst = worst.max(f - obj.value(&gd) - 1e-12 * (1.0 + f.abs()));
        same &= trace.records[k + 1].value == f && trace.records[k + 1].restart == restart;
    }
    Ok((worst, same))
}

fn verify_discrete() -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let drift = conservation_drift(1.0, 0.5, 1.0, 10_000);
    out.push(CheckReport::new(
        "discrete-conservation",
        values([("relative_drift", drift)]),
        vec![BoundCheck::new("conserved_quantity", drift, 1e-10, 0.0)],
    ));

    let seed = 2024;
    let q = gen_random_quadratic(50, 0.03, 15.0, seed)?;
    let xq = standard_normal_vector(&mut seeded_rng(seed, 1), 50);
    let li = gen_logistic_instance(20, 80, seed)?;
    let logistic = LogisticObjective::new(li.a, li.y)?;
    let ls = gen_logsumexp_instance(20, 80, seed)?;
    let lse = LogSumExpObjective::new(ls.a, ls.b, 1.0)?;
    let cases: [(&str, &dyn SmoothObjective, DVector<f64>); 3] =
        [("quadratic", &q, xq.clone()), ("logistic", &logistic, DVector::zeros(20)), ("logsumexp", &lse, DVector::zeros(20))];
    let mut rows = Vec::new();
    for (name, obj, x0) in cases {
        let (margin, same) = gd_dominance_margin(obj, &x0, 1.0 / obj.lipschitz().sqrt(), 500)?;
        rows.push(BoundCheck::new(format!("gd_dominance[{name}]"), margin, 0.0, 0.0));
        rows.push(BoundCheck::new(format!("replay_matches[{name}]"), f64::from(u8::from(!same)), 0.0, 0.0));
    }
    out.push(CheckReport::new("gd-dominance", BTreeMap::new(), rows));

    let h = 1.0 / q.lipschitz().sqrt();
    let s = 1.0 / q.lipschitz();
    let comp = CompositeObjective::new(Box::new(q.clone()), 0.0)?;
    let mut rows = Vec::new();
    for c in RestartCriterion::ALL {
        let cfg = RcmConfig::new(h, c, 300);
        let a = rcm_comp_run(&comp, &xq, &cfg)?;
        let b = rcm_run(&q, &xq, &cfg)?;
        let equal = a.records == b.records && a.x == b.x;
        rows.push(BoundCheck::new(format!("zero_weight_reduction[rcm-{}]", c.tag()), f64::from(u8::from(!equal)), 0.0, 0.0));
    }
    let a = fista_run(&comp, &xq, s, 300)?;
    let b = agd_run(&q, &xq, s, 300)?;
    let equal = a.records == b.records && a.x == b.x;
    rows.push(BoundCheck::new("zero_weight_reduction[fista]", f64::from(u8::from(!equal)), 0.0, 0.0));
    out.push(CheckReport::new("composite-reduction", BTreeMap::new(), rows));

    let d = QuadraticObjective::diagonal(&[1.0, 2.0], DVector::zeros(2))?;
    let maxima = kinetic_maxima(&d, &DVector::from_vec(vec![1.0, 1.0]), 1e-3, 60.0)?;
    let rows = maxima
        .iter()
        .enumerate()
        .map(|(i, m)| BoundCheck::new(format!("kinetic_max_not_mmd[{i}]"), m.dissipation_numerator, 0.0, 0.0))
        .collect::<Vec<_>>();
    let mut report = CheckReport::new("mmd-kinetic-exclusion", values([("maxima", maxima.len() as f64)]), rows);
    report.pass &= report.bounds.iter().all(|b| b.lhs < 0.0);
    out.push(report);
    Ok(out)
}

/// Every continuous check on a few spectra plus the discrete invariants.
pub fn verify() -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (mu, l) in [(1.0, 1.0), (0.1, 4.0), (0.03, 15.0)] {
        let p = ContinuousParams { mu, lipschitz: l, n: Some(if mu == l { 1 } else { 5 }), dt: None, restarts: 8 };
        for check in ContinuousCheck::ALL {
            let mut r = run_continuous_check(check, &p)?;
            r.check = format!("{}[mu={mu},L={l}]", r.check);
            out.push(r);
        }
    }
    out.extend(verify_discrete()?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mmd_bounds_report_for_unit_quadratic() {
        let r = run_continuous_check(ContinuousCheck::MmdBounds, &ContinuousParams::default()).unwrap();
        assert!(r.pass);
        assert!((r.values["t_a"] - 1.165_561).abs() < 1e-4);
        assert_eq!(r.values["lower_bound"], 0.125);
        assert_eq!(r.values["upper_bound"], 32.0);
    }

    #[test]
    fn every_check_passes_on_an_anisotropic_problem() {
        let p = ContinuousParams { mu: 0.2, lipschitz: 3.0, n: Some(4), dt: None, restarts: 5 };
        for c in ContinuousCheck::ALL {
            let r = run_continuous_check(c, &p).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn bad_parameters_are_usage_errors() {
        let p = ContinuousParams { mu: 2.0, lipschitz: 1.0, ..Default::default() };
        assert!(run_continuous_check(ContinuousCheck::MmdBounds, &p).unwrap_err().is_usage());
        let p = ContinuousParams { mu: 1.0, lipschitz: 2.0, n: Some(1), ..Default::default() };
        assert!(run_continuous_check(ContinuousCheck::Length, &p).unwrap_err().is_usage());
    }

    #[test]
    fn conservation_drift_is_roundoff() {
        assert!(conservation_drift(1.0, 0.5, 1.0, 10_000) < 1e-10);
    }
}
