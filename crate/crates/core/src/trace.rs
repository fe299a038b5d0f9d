use nalgebra::DVector;
use serde::Serialize;

/// Per-iteration metrics; `residual` is ‖∇f‖ for smooth methods and ‖∂⁻f‖
/// for composite ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub value: f64,
    pub residual: f64,
    pub restart: bool,
    /// At least one coordinate was projected to zero after changing sign.
    pub crossed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RunStatus {
    Completed,
    /// Stopped at `iter` after a NaN or a value/residual above 1e150.
    Diverged { iter: usize },
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub method: String,
    /// h for the conservative methods, s for gradient/Nesterov/FISTA.
    pub step: f64,
    /// Record 0 is the starting point.
    pub records: Vec<TraceRecord>,
    /// Last iterate.
    pub x: DVector<f64>,
    pub status: RunStatus,
}

pub(crate) const DIVERGENCE_LIMIT: f64 = 1e150;

pub(crate) fn is_divergent(value: f64, residual: f64) -> bool {
    !(value.abs() <= DIVERGENCE_LIMIT && residual <= DIVERGENCE_LIMIT)
}

impl Trace {
    pub(crate) fn start(method: impl Into<String>, step: f64, x0: &DVector<f64>, value: f64, residual: f64) -> Self {
        let mut trace = Self {
            method: method.into(),
            step,
            records: Vec::new(),
            x: x0.clone(),
            status: RunStatus::Completed,
        };
        trace.push(0, value, residual, false, false);
        trace
    }

    /// Appends a record; returns false (and marks the run diverged) when the
    /// values are no longer finite.
    pub(crate) fn push(&mut self, iter: usize, value: f64, residual: f64, restart: bool, crossed: bool) -> bool {
        self.records.push(TraceRecord { iter, value, residual, restart, crossed });
        if is_divergent(value, residual) {
            log::warn!("{}: divergence at iteration {iter} (f = {value:e}, residual = {residual:e})", self.method);
            self.status = RunStatus::Diverged { iter };
            return false;
        }
        true
    }

    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn restart_count(&self) -> usize {
        self.records.iter().filter(|r| r.restart).count()
    }

    pub fn final_value(&self) -> f64 {
        self.records.last().map(|r| r.value).unwrap_or(f64::NAN)
    }

    /// First iteration whose record satisfies `pred`.
    pub fn first_iter_where(&self, pred: impl Fn(&TraceRecord) -> bool) -> Option<usize> {
        self.records.iter().find(|r| pred(r)).map(|r| r.iter)
    }
}
