use nalgebra::{DMatrix, DVector};

use super::SmoothObjective;
use crate::error::{Error, Result};
use crate::linalg::lambda_max_aat;

/// f(x) = ρ·log Σᵢ exp((aᵢᵀx − bᵢ)/ρ), with aᵢ the columns of the n×m matrix A.
#[derive(Debug, Clone)]
pub struct LogSumExpObjective {
    a: DMatrix<f64>,
    b: DVector<f64>,
    rho: f64,
    lipschitz: f64,
}

impl LogSumExpObjective {
    /// The gradient Lipschitz bound is λ_max(AAᵀ)/ρ.
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        if a.ncols() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.ncols(), found: b.len() });
        }
        let lipschitz = lambda_max_aat(&a)? / rho;
        Ok(Self { a, b, rho, lipschitz })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    fn exponents(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.a.tr_mul(x) - &self.b) / self.rho
    }

    /// Softmax weights of the exponents, computed after subtracting the max.
    pub fn softmax(&self, x: &DVector<f64>) -> DVector<f64> {
        let z = self.exponents(x);
        let shift = z.max();
        let e = z.map(|zi| (zi - shift).exp());
        let total = e.sum();
        e / total
    }
}

impl SmoothObjective for LogSumExpObjective {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let z = self.exponents(x);
        let shift = z.max();
        let total: f64 = z.iter().map(|zi| (zi - shift).exp()).sum();
        self.rho * (shift + total.ln())
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * self.softmax(x)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{gen_logsumexp_instance, gradient_check, seeded_rng, standard_normal_vector};

    #[test]
    fn zero_data_gives_uniform_softmax() {
        let f = LogSumExpObjective::new(DMatrix::zeros(3, 7), DVector::zeros(7), 2.0).unwrap();
        let x = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        assert!((f.value(&x) - 2.0 * 7f64.ln()).abs() < 1e-12);
        assert_eq!(f.gradient(&x), DVector::zeros(3));
    }

    #[test]
    fn gradient_norm_bounded_by_largest_column() {
        let inst = gen_logsumexp_instance(6, 25, 2).unwrap();
        let f = LogSumExpObjective::new(inst.a.clone(), inst.b, 1.0).unwrap();
        let max_col = inst.a.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut rng = seeded_rng(1, 0);
        for _ in 0..20 {
            let x = standard_normal_vector(&mut rng, 6) * 3.0;
            assert!(f.gradient(&x).norm() <= max_col + 1e-12);
        }
    }

    #[test]
    fn no_overflow_far_from_origin() {
        let inst = gen_logsumexp_instance(4, 10, 9).unwrap();
        let f = LogSumExpObjective::new(inst.a, inst.b, 1.0).unwrap();
        let x = DVector::from_element(4, 1e3);
        assert!(f.value(&x).is_finite());
        assert!(f.gradient(&x).iter().all(|g| g.is_finite()));
    }

    #[test]
    fn lipschitz_of_identity_data() {
        let f = LogSumExpObjective::new(DMatrix::identity(3, 3), DVector::zeros(3), 2.0).unwrap();
        assert!((f.lipschitz() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let inst = gen_logsumexp_instance(10, 40, 4).unwrap();
        let f = LogSumExpObjective::new(inst.a, inst.b, 1.0).unwrap();
        let mut rng = seeded_rng(8, 0);
        for _ in 0..20 {
            let x = standard_normal_vector(&mut rng, 10);
            assert!(gradient_check(&f, &x) < 1e-5);
        }
    }

    #[test]
    fn rejects_nonpositive_rho() {
        let r = LogSumExpObjective::new(DMatrix::zeros(2, 2), DVector::zeros(2), 0.0);
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }
}
