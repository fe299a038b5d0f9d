//! Benchmark runner and theory-check reports on top of `rcm-core`.

pub mod checks;
pub mod error;
pub mod experiment;
pub mod method;
pub mod output;
pub mod problem;

pub use error::{HarnessError, Result};
pub use experiment::{estimate_fstar, run_experiment, run_method, ExperimentConfig, ExperimentOutput};
pub use method::Method;
pub use output::{read_csv, write_csv, write_report, ResultRow};
pub use problem::{Instance, Problem};
