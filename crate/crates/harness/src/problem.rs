use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rcm_core::objectives::{
    gen_logistic_instance, gen_logsumexp_instance, gen_random_quadratic, l1_weight_rule, seeded_rng, standard_normal_vector,
    CompositeObjective, LogSumExpObjective, LogisticObjective, ProblemKind, SmoothObjective,
};

use crate::error::{HarnessError, Result};

/// Spectrum range of the random quadratics.
pub const EIGEN_RANGE: (f64, f64) = (0.03, 15.0);
/// ρ of the LogSumExp family.
pub const LSE_RHO: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Quadratic,
    Logistic,
    LogSumExp,
}

impl Problem {
    pub fn kind(self) -> ProblemKind {
        match self {
            Problem::Quadratic => ProblemKind::Quadratic,
            Problem::Logistic => ProblemKind::Logistic,
            Problem::LogSumExp => ProblemKind::LogSumExp,
        }
    }

    /// (n, m) used when the command line gives none.
    pub fn default_size(self) -> (usize, usize) {
        match self {
            Problem::Quadratic => (1000, 0),
            Problem::Logistic => (100, 500),
            Problem::LogSumExp => (50, 200),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Quadratic => "quadratic",
            Problem::Logistic => "logistic",
            Problem::LogSumExp => "logsumexp",
        })
    }
}

impl FromStr for Problem {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(Problem::Quadratic),
            "logistic" => Ok(Problem::Logistic),
            "logsumexp" => Ok(Problem::LogSumExp),
            _ => Err(HarnessError::Config(format!("unknown problem `{s}`"))),
        }
    }
}

pub enum Objective {
    Smooth(Box<dyn SmoothObjective>),
    Composite(CompositeObjective),
}

/// One repetition: the objective, its starting point, and f* when it is
/// known in closed form.
pub struct Instance {
    pub objective: Objective,
    pub x0: DVector<f64>,
    pub exact_fstar: Option<f64>,
}

impl Instance {
    /// x0 is a seeded standard normal (stream 1) for quadratics and 0
    /// otherwise.
    pub fn generate(problem: Problem, l1: bool, n: usize, m: usize, seed: u64) -> Result<Self> {
        let (smooth, x0, exact_fstar, l1_data): (Box<dyn SmoothObjective>, _, _, _) = match problem {
            Problem::Quadratic => {
                let q = gen_random_quadratic(n, EIGEN_RANGE.0, EIGEN_RANGE.1, seed)?;
                let x0 = standard_normal_vector(&mut seeded_rng(seed, 1), n);
                let fstar = if l1 { None } else { Some(q.min_value()?) };
                let b = q.linear().clone();
                (Box::new(q), x0, fstar, b)
            }
            Problem::Logistic => {
                let inst = gen_logistic_instance(n, m, seed)?;
                let obj = LogisticObjective::new(inst.a, inst.y)?;
                let g0 = obj.gradient(&DVector::zeros(n));
                (Box::new(obj), DVector::zeros(n), None, g0)
            }
            Problem::LogSumExp => {
                let inst = gen_logsumexp_instance(n, m, seed)?;
                let obj = LogSumExpObjective::new(inst.a, inst.b, LSE_RHO)?;
                let g0 = obj.gradient(&DVector::zeros(n));
                (Box::new(obj), DVector::zeros(n), None, g0)
            }
        };
        let objective = if l1 {
            let gamma = l1_weight_rule(problem.kind(), &l1_data)?;
            Objective::Composite(CompositeObjective::new(smooth, gamma)?)
        } else {
            Objective::Smooth(smooth)
        };
        Ok(Self { objective, x0, exact_fstar })
    }

    /// Lipschitz constant of the smooth part.
    pub fn lipschitz(&self) -> f64 {
        match &self.objective {
            Objective::Smooth(o) => o.lipschitz(),
            Objective::Composite(c) => c.smooth().lipschitz(),
        }
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        match &self.objective {
            Objective::Smooth(o) => o.value(x),
            Objective::Composite(c) => c.value(x),
        }
    }
}
