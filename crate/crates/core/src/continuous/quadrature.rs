//! Adaptive Gauss–Kronrod quadrature and the one-dimensional visiting time.

use std::cell::Cell;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_INTERVALS: usize = 5000;

/// (Kronrod estimate, |Kronrod − Gauss|) on [a, b].
fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive G7–K15: bisects the interval with the largest error
/// estimate until the summed estimate drops below `abs_tol`.
pub fn gauss_kronrod_adaptive(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature("infinite interval".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::from([Piece { a, b, value, error }]);
    let (mut total, mut total_err) = (value, error);
    while total_err > abs_tol {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!("no convergence: error estimate {total_err:e} after {MAX_INTERVALS} intervals")));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        if !total.is_finite() {
            return Err(Error::Quadrature("non-finite integrand".into()));
        }
        // refresh the running sum occasionally to limit cancellation drift
        if heap.len() % 256 == 0 {
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}

/// Time for the flow from rest at x0 to reach x_star:
/// ∫ dy/√(2(f(x0) − f(y))) between x0 and x_star, with y = x0 ± u².
pub fn visiting_time_1d(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, x0: f64, x_star: f64) -> Result<f64> {
    let slope = df(x0);
    if slope == 0.0 {
        return Err(Error::Degenerate("f'(x0) = 0: the visiting time diverges".into()));
    }
    if x_star == x0 {
        return Ok(0.0);
    }
    let s = (x_star - x0).signum();
    if s * slope >= 0.0 {
        return Err(Error::InvalidParameter("x_star must lie downhill from x0".into()));
    }
    let f0 = f(x0);
    let u_end = (x_star - x0).abs().sqrt();
    let violated = Cell::new(false);
    // below this u the energy gap is taken from the tangent line
    let u_small = 1e-6 * u_end;
    let integrand = |u: f64| {
        let drop = if u < u_small { slope.abs() * u * u } else { f0 - f(x0 + s * u * u) };
        if drop > 0.0 {
            2.0 * u / (2.0 * drop).sqrt()
        } else {
            violated.set(true);
            0.0
        }
    };
    let t = gauss_kronrod_adaptive(integrand, 0.0, u_end, 1e-10)?;
    if violated.get() {
        return Err(Error::InvalidParameter("f(y) < f(x0) fails between x0 and x_star".into()));
    }
    Ok(t)
}
