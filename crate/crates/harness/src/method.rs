use std::fmt;
use std::str::FromStr;

use rcm_core::discrete::RestartCriterion;

use crate::error::HarnessError;
use crate::problem::Problem;

/// Registered optimizers, identified by their CLI/CSV names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Gd,
    NagC,
    /// NAG-SC with μ = λ_min.
    NagSc,
    /// NAG-SC with μ = λ_min/3.
    NagScUnder,
    NagCRestart,
    Rcm(RestartCriterion),
    Fista,
    FistaRestart,
    RcmComp(RestartCriterion),
}

impl Method {
    pub fn all() -> Vec<Method> {
        let mut out = vec![Method::Gd, Method::NagC, Method::NagSc, Method::NagScUnder, Method::NagCRestart];
        out.extend(RestartCriterion::ALL.map(Method::Rcm));
        out.extend([Method::Fista, Method::FistaRestart]);
        out.extend(RestartCriterion::ALL.map(Method::RcmComp));
        out
    }

    pub fn is_composite(self) -> bool {
        matches!(self, Method::Fista | Method::FistaRestart | Method::RcmComp(_))
    }

    pub fn needs_strong_convexity(self) -> bool {
        matches!(self, Method::NagSc | Method::NagScUnder)
    }

    /// The method list of each benchmark family.
    pub fn default_roster(problem: Problem, l1: bool) -> Vec<Method> {
        use RestartCriterion::*;
        if l1 {
            return vec![
                Method::Fista,
                Method::FistaRestart,
                Method::RcmComp(Grad),
                Method::RcmComp(MmdDr),
                Method::RcmComp(MmdR),
                Method::RcmComp(Kin),
            ];
        }
        let head = match problem {
            Problem::Quadratic => vec![Method::NagSc, Method::NagScUnder, Method::NagCRestart],
            Problem::Logistic | Problem::LogSumExp => vec![Method::Gd, Method::NagCRestart],
        };
        head.into_iter().chain([Grad, MmdDr, MmdR, Kin].map(Method::Rcm)).collect()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Gd => f.write_str("gd"),
            Method::NagC => f.write_str("nag-c"),
            Method::NagSc => f.write_str("nag-sc"),
            Method::NagScUnder => f.write_str("nag-sc-3"),
            Method::NagCRestart => f.write_str("nag-c-restart"),
            Method::Rcm(c) => write!(f, "rcm-{}", c.tag()),
            Method::Fista => f.write_str("fista"),
            Method::FistaRestart => f.write_str("fista-restart"),
            Method::RcmComp(c) => write!(f, "rcm-comp-{}", c.tag()),
        }
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::all()
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| HarnessError::UnknownMethod(s.to_string()))
    }
}
