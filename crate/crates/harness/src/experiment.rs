use rayon::prelude::*;
use rcm_core::composite::{fista_restart_run, fista_run, rcm_comp_run};
use rcm_core::discrete::{gradient_descent_run, nag_c_restart_run, nag_c_run, nag_sc_run, rcm_run, RcmConfig};
use rcm_core::trace::{RunStatus, Trace};

use crate::error::{HarnessError, Result};
use crate::method::Method;
use crate::output::ResultRow;
use crate::problem::{Instance, Objective, Problem};

/// Budget multiplier of the reference run behind the f* estimate.
const REFERENCE_BUDGET: usize = 10;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub l1: bool,
    pub n: usize,
    pub m: usize,
    pub reps: usize,
    pub max_iter: usize,
    pub base_seed: u64,
    #[serde(skip)]
    pub methods: Vec<Method>,
    /// Overrides h = 1/√L of the conservative methods.
    pub h: Option<f64>,
    /// Overrides s = 1/L of the gradient, Nesterov and FISTA methods.
    pub s: Option<f64>,
}

impl ExperimentConfig {
    /// Default sizes and roster for a family.
    pub fn new(problem: Problem, l1: bool) -> Self {
        let (n, m) = problem.default_size();
        Self {
            problem,
            l1,
            n,
            m,
            reps: 1,
            max_iter: 1000,
            base_seed: 0,
            methods: Method::default_roster(problem, l1),
            h: None,
            s: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(HarnessError::Config("reps must be at least 1".into()));
        }
        if self.n == 0 || (self.problem != Problem::Quadratic && self.m == 0) {
            return Err(HarnessError::Config("problem sizes must be positive".into()));
        }
        if self.methods.is_empty() {
            return Err(HarnessError::Config("no methods selected".into()));
        }
        for m in &self.methods {
            if m.is_composite() != self.l1 {
                let kind = if self.l1 { "l1-composite" } else { "smooth" };
                return Err(HarnessError::Config(format!("method `{m}` does not apply to {kind} problems")));
            }
            if m.needs_strong_convexity() && self.problem != Problem::Quadratic {
                return Err(HarnessError::Config(format!("method `{m}` needs a strong convexity constant")));
            }
        }
        for (name, v) in [("h", self.h), ("s", self.s)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(HarnessError::Config(format!("step {name} must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }
}

/// Runs one method on one instance with the default or overridden steps.
pub fn run_method(inst: &Instance, method: Method, max_iter: usize, h: Option<f64>, s: Option<f64>) -> Result<Trace> {
    let lipschitz = inst.lipschitz();
    let h = h.unwrap_or_else(|| RcmConfig::default_step(lipschitz));
    let s = s.unwrap_or(1.0 / lipschitz);
    let x0 = &inst.x0;
    let trace = match (&inst.objective, method) {
        (Objective::Smooth(f), Method::Gd) => gradient_descent_run(f.as_ref(), x0, s, max_iter)?,
        (Objective::Smooth(f), Method::NagC) => nag_c_run(f.as_ref(), x0, s, max_iter)?,
        (Objective::Smooth(f), Method::NagCRestart) => nag_c_restart_run(f.as_ref(), x0, s, max_iter)?,
        (Objective::Smooth(f), Method::NagSc | Method::NagScUnder) => {
            let mu = f
                .strong_convexity()
                .ok_or_else(|| HarnessError::Config(format!("method `{method}` needs a strong convexity constant")))?;
            let mu = if method == Method::NagScUnder { mu / 3.0 } else { mu };
            nag_sc_run(f.as_ref(), x0, s, mu, max_iter)?
        }
        (Objective::Smooth(f), Method::Rcm(c)) => rcm_run(f.as_ref(), x0, &RcmConfig::new(h, c, max_iter))?,
        (Objective::Composite(f), Method::Fista) => fista_run(f, x0, s, max_iter)?,
        (Objective::Composite(f), Method::FistaRestart) => fista_restart_run(f, x0, s, max_iter)?,
        (Objective::Composite(f), Method::RcmComp(c)) => rcm_comp_run(f, x0, &RcmConfig::new(h, c, max_iter))?,
        _ => return Err(HarnessError::Config(format!("method `{method}` does not apply to this problem"))),
    };
    Ok(trace)
}

/// Exact f* when known, otherwise the smallest value seen along a restarted
/// accelerated run with ten times the budget.
pub fn estimate_fstar(inst: &Instance, max_iter: usize) -> Result<f64> {
    if let Some(f) = inst.exact_fstar {
        return Ok(f);
    }
    let reference = match inst.objective {
        Objective::Smooth(_) => Method::NagCRestart,
        Objective::Composite(_) => Method::FistaRestart,
    };
    let trace = run_method(inst, reference, REFERENCE_BUDGET * max_iter.max(1), None, None)?;
    Ok(trace.records.iter().map(|r| r.value).filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    /// Ordered by method (config order), then rep, then iteration.
    pub rows: Vec<ResultRow>,
    /// f* estimate of each repetition.
    pub fstar: Vec<f64>,
    /// Rows whose gap was below −1e-12(1 + |f̂*|) before clipping; smaller
    /// negatives are rounding and are clipped silently.
    pub clipped_gaps: usize,
    /// (method, rep, iteration) of every divergent run.
    pub diverged: Vec<(String, usize, usize)>,
}

struct RepResult {
    fstar: f64,
    per_method: Vec<Vec<ResultRow>>,
    clipped: usize,
    diverged: Vec<(String, usize, usize)>,
}

fn run_rep(cfg: &ExperimentConfig, rep: usize) -> Result<RepResult> {
    let seed = cfg.base_seed.wrapping_add(rep as u64);
    let inst = Instance::generate(cfg.problem, cfg.l1, cfg.n, cfg.m, seed)?;
    let fstar = estimate_fstar(&inst, cfg.max_iter)?;
    let mut clipped = 0;
    let mut diverged = Vec::new();
    let mut per_method = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let trace = run_method(&inst, method, cfg.max_iter, cfg.h, cfg.s)?;
        let name = method.to_string();
        let mut rows = Vec::with_capacity(trace.records.len());
        for r in &trace.records {
            let mut gap = r.value - fstar;
            if gap < 0.0 {
                if gap < -1e-12 * (1.0 + fstar.abs()) {
                    clipped += 1;
                }
                gap = 0.0;
            }
            rows.push(ResultRow {
                method: name.clone(),
                rep,
                iter: r.iter,
                fval: r.value,
                gap,
                residual: r.residual,
                restart: u8::from(r.restart),
            });
        }
        if let RunStatus::Diverged { iter } = trace.status {
            diverged.push((name, rep, iter));
        }
        per_method.push(rows);
    }
    Ok(RepResult { fstar, per_method, clipped, diverged })
}

/// Runs every method on every repetition; repetitions run in parallel and
/// the rows are merged in a fixed order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let reps: Vec<RepResult> = (0..cfg.reps).into_par_iter().map(|rep| run_rep(cfg, rep)).collect::<Result<_>>()?;
    let mut out = ExperimentOutput::default();
    for k in 0..cfg.methods.len() {
        for rep in &reps {
            out.rows.extend_from_slice(&rep.per_method[k]);
        }
    }
    for rep in reps {
        out.fstar.push(rep.fstar);
        out.clipped_gaps += rep.clipped;
        out.diverged.extend(rep.diverged);
    }
    if out.clipped_gaps > 0 {
        log::warn!("{} negative gaps clipped to 0", out.clipped_gaps);
    }
    for (method, rep, iter) in &out.diverged {
        log::warn!("{method} diverged at iteration {iter} in rep {rep}");
    }
    Ok(out)
}
