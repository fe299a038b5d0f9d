//! Seeded random instances. Every generator draws from a ChaCha20 stream
//! seeded by `seed_from_u64(seed)` in a fixed order, so instances are
//! reproducible across platforms.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::QuadraticObjective;
use crate::error::{Error, Result};

/// ChaCha20 stream `stream` of the generator seeded with `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn standard_normal_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// n×m matrix with i.i.d. standard normal entries, drawn in row-major order.
fn standard_normal_matrix<R: Rng>(rng: &mut R, n: usize, m: usize) -> DMatrix<f64> {
    let data: Vec<f64> = (0..n * m).map(|_| rng.sample(StandardNormal)).collect();
    DMatrix::from_row_slice(n, m, &data)
}

/// Random SPD quadratic ½xᵀAx + bᵀx.
///
/// Draw order: n eigenvalues uniform on `[λ_lo, λ_hi]`, an n×n Gaussian
/// matrix whose QR factor gives the eigenbasis, then b ~ N(0, I).
pub fn gen_random_quadratic(n: usize, lambda_lo: f64, lambda_hi: f64, seed: u64) -> Result<QuadraticObjective> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if !(lambda_lo > 0.0 && lambda_lo <= lambda_hi) || !lambda_hi.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid eigenvalue range [{lambda_lo}, {lambda_hi}]")));
    }
    let mut rng = seeded_rng(seed, 0);
    let eigenvalues: Vec<f64> = (0..n).map(|_| rng.random_range(lambda_lo..=lambda_hi)).collect();
    let gauss = standard_normal_matrix(&mut rng, n, n);
    let b = standard_normal_vector(&mut rng, n);

    let q = gauss.qr().q();
    let scaled = DMatrix::from_fn(n, n, |i, j| q[(i, j)] * eigenvalues[j]);
    let a = &scaled * q.transpose();
    let a = (&a + a.transpose()) * 0.5;

    let lo = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(QuadraticObjective::from_spectrum(a, b, (lo, hi)))
}

/// A logistic-regression instance: data A (n×m), labels y, generating x_true.
#[derive(Debug, Clone)]
pub struct LogisticInstance {
    pub a: DMatrix<f64>,
    pub y: DVector<f64>,
    pub x_true: DVector<f64>,
}

/// Draw order: x_true ~ N(0, 0.01·I), A row-major N(0, 1), then one uniform
/// per label in index order with P(yᵢ = 1) = 1/(1 + e^{−aᵢᵀx_true}).
pub fn gen_logistic_instance(n: usize, m: usize, seed: u64) -> Result<LogisticInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter(format!("sizes must be positive, got n={n}, m={m}")));
    }
    let mut rng = seeded_rng(seed, 0);
    let x_true = standard_normal_vector(&mut rng, n) * 0.1;
    let a = standard_normal_matrix(&mut rng, n, m);
    let margins = a.tr_mul(&x_true);
    let y = DVector::from_iterator(
        m,
        margins.iter().map(|&t| {
            let p = 1.0 / (1.0 + (-t).exp());
            let u: f64 = rng.random();
            if u < p {
                1.0
            } else {
                0.0
            }
        }),
    );
    Ok(LogisticInstance { a, y, x_true })
}

#[derive(Debug, Clone)]
pub struct LogSumExpInstance {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

/// Draw order: A row-major N(0, 1), then b ~ N(0, I).
pub fn gen_logsumexp_instance(n: usize, m: usize, seed: u64) -> Result<LogSumExpInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter(format!("sizes must be positive, got n={n}, m={m}")));
    }
    let mut rng = seeded_rng(seed, 0);
    let a = standard_normal_matrix(&mut rng, n, m);
    let b = standard_normal_vector(&mut rng, m);
    Ok(LogSumExpInstance { a, b })
}
