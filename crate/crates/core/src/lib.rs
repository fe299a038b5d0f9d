//! Restart-conservative optimization: the conservative flow ẍ = −∇f(x)
//! restarted from rest, its symplectic Euler discretizations, ℓ¹-composite
//! variants, and Nesterov/FISTA baselines.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod composite;
pub mod continuous;
pub mod discrete;
pub mod error;
pub mod linalg;
pub mod objectives;
pub mod trace;

pub use error::{Error, Result};
