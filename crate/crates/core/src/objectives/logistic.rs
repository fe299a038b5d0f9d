use nalgebra::{DMatrix, DVector};

use super::SmoothObjective;
use crate::error::{Error, Result};
use crate::linalg::lambda_max_aat;

/// Negative log-likelihood of logistic regression,
/// f(x) = Σᵢ (1 − yᵢ)·aᵢᵀx + log(1 + e^{−aᵢᵀx}), with aᵢ the columns of A.
#[derive(Debug, Clone)]
pub struct LogisticObjective {
    a: DMatrix<f64>,
    y: DVector<f64>,
    lipschitz: f64,
}

/// log(1 + e^{−t}) without overflow for large |t|.
pub(crate) fn log1p_exp_neg(t: f64) -> f64 {
    if t >= 0.0 {
        (-t).exp().ln_1p()
    } else {
        -t + t.exp().ln_1p()
    }
}

/// σ(−t) = 1 / (1 + e^{t}).
pub(crate) fn sigmoid_neg(t: f64) -> f64 {
    if t >= 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

impl LogisticObjective {
    /// `a` is n×m (one column per sample), `y` has length m with entries in {0, 1}.
    /// The gradient Lipschitz bound is ¼·λ_max(AAᵀ).
    pub fn new(a: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if a.ncols() != y.len() {
            return Err(Error::DimensionMismatch { expected: a.ncols(), found: y.len() });
        }
        if let Some((index, &value)) = y.iter().enumerate().find(|(_, &v)| v != 0.0 && v != 1.0) {
            return Err(Error::InvalidLabel { index, value });
        }
        let lipschitz = 0.25 * lambda_max_aat(&a)?;
        Ok(Self { a, y, lipschitz })
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn labels(&self) -> &DVector<f64> {
        &self.y
    }
}

impl SmoothObjective for LogisticObjective {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let t = self.a.tr_mul(x);
        t.iter().zip(self.y.iter()).map(|(&ti, &yi)| (1.0 - yi) * ti + log1p_exp_neg(ti)).sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let t = self.a.tr_mul(x);
        let w = DVector::from_iterator(t.len(), t.iter().zip(self.y.iter()).map(|(&ti, &yi)| (1.0 - yi) - sigmoid_neg(ti)));
        &self.a * w
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{gen_logistic_instance, gradient_check, seeded_rng, standard_normal_vector};

    #[test]
    fn value_at_origin_is_m_log_two() {
        let inst = gen_logistic_instance(5, 12, 3).unwrap();
        let f = LogisticObjective::new(inst.a.clone(), inst.y.clone()).unwrap();
        let x = DVector::zeros(5);
        assert!((f.value(&x) - 12.0 * 2f64.ln()).abs() < 1e-12);
        let expected = &inst.a * inst.y.map(|yi| 0.5 - yi);
        assert!((f.gradient(&x) - expected).norm() < 1e-12);
    }

    #[test]
    fn stable_for_large_margins() {
        assert!((log1p_exp_neg(800.0)).abs() < 1e-300);
        assert!((log1p_exp_neg(-800.0) - 800.0).abs() < 1e-9);
        assert_eq!(sigmoid_neg(-800.0), 1.0);
        assert_eq!(sigmoid_neg(800.0), 0.0);
        let a = DMatrix::from_element(1, 1, 1.0);
        let f = LogisticObjective::new(a, DVector::from_element(1, 1.0)).unwrap();
        assert!(f.value(&DVector::from_element(1, -1e4)).is_finite());
    }

    #[test]
    fn lipschitz_of_identity_data() {
        let f = LogisticObjective::new(DMatrix::identity(3, 3), DVector::from_vec(vec![0.0, 1.0, 1.0])).unwrap();
        assert!((f.lipschitz() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let inst = gen_logistic_instance(8, 30, 11).unwrap();
        let f = LogisticObjective::new(inst.a, inst.y).unwrap();
        let mut rng = seeded_rng(5, 0);
        for _ in 0..20 {
            let x = standard_normal_vector(&mut rng, 8);
            assert!(gradient_check(&f, &x) < 1e-5);
        }
    }

    #[test]
    fn rejects_bad_labels_and_shapes() {
        let a = DMatrix::identity(2, 2);
        assert!(matches!(
            LogisticObjective::new(a.clone(), DVector::from_vec(vec![0.0, 0.5])),
            Err(Error::InvalidLabel { index: 1, .. })
        ));
        assert!(matches!(LogisticObjective::new(a, DVector::zeros(3)), Err(Error::DimensionMismatch { .. })));
    }
}
