//! Globally adaptive Gauss-Kronrod (7/15) quadrature on compact intervals.
//!
//! The integrator is generic over the value type so that the same code path
//! serves real integrals and the complex Cauchy kernel. Callers supply an
//! initial partition; intervals with the largest error estimate are bisected
//! until the total estimate falls below `max(abs_tol, rel_tol·|I|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

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

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values that can be accumulated by the integrator.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Relative error still accepted when subdivision is exhausted before
    /// `rel_tol` is met.
    pub accept_rel: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 4000,
            accept_rel: 1e-9,
        }
    }
}

impl QuadConfig {
    /// Purely relative control, used for transforms whose values can be tiny.
    pub fn relative(rel_tol: f64) -> Self {
        QuadConfig {
            abs_tol: 0.0,
            rel_tol,
            accept_rel: rel_tol.max(1e-9),
            ..QuadConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub intervals: usize,
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    abs_value: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kronrod = fc * WGK[7];
    let mut abs_k = fc.magnitude() * WGK[7];
    let mut fvals = [(T::zero(), T::zero()); 7];
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fvals[j] = (f1, f2);
        kronrod = kronrod + (f1 + f2) * WGK[j];
        abs_k += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }
    // Deviation from the mean, used to rescale the raw |K - G| estimate.
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).magnitude();
    for (j, (f1, f2)) in fvals.iter().enumerate() {
        asc += WGK[j] * ((*f1 - mean).magnitude() + (*f2 - mean).magnitude());
    }
    let result = kronrod * half;
    let abs_result = abs_k * half.abs();
    let asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).magnitude();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_result > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_result);
    }
    (result, err, abs_result)
}

/// Integrates `f` over `[breaks[0], breaks[last]]` starting from the given
/// partition. `breaks` must be sorted and contain at least two points.
pub fn integrate_partitioned<T, F>(f: F, breaks: &[f64], cfg: &QuadConfig) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    debug_assert!(breaks.len() >= 2);
    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel<T>> = Vec::new();
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error, abs_value) = kronrod15(&f, w[0], w[1]);
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
            abs_value,
        });
    }
    if heap.is_empty() {
        return Ok(QuadResult {
            value: T::zero(),
            error: 0.0,
            intervals: 0,
        });
    }

    let totals = |heap: &BinaryHeap<Panel<T>>, settled: &[Panel<T>]| {
        let mut value = T::zero();
        let mut error = 0.0;
        let mut abs_value = 0.0;
        for p in heap.iter().chain(settled.iter()) {
            value = value + p.value;
            error += p.error;
            abs_value += p.abs_value;
        }
        (value, error, abs_value)
    };

    let (mut value, mut error, mut abs_value) = totals(&heap, &settled);
    let mut count = heap.len();
    loop {
        if !value.is_finite_value() || !error.is_finite() {
            return Err(Error::QuadratureFailure {
                tolerance: cfg.abs_tol.max(cfg.rel_tol * value.magnitude()),
                estimate: f64::INFINITY,
            });
        }
        let tol = cfg
            .abs_tol
            .max(cfg.rel_tol * value.magnitude())
            .max(50.0 * f64::EPSILON * abs_value);
        if error <= tol {
            break;
        }
        // Out of intervals, or every remaining panel is at the resolution limit.
        let exhausted = count >= cfg.max_intervals || heap.is_empty();
        if exhausted {
            let (v, e, _) = totals(&heap, &settled);
            if e <= cfg.abs_tol.max(cfg.accept_rel * v.magnitude()) {
                break;
            }
            return Err(Error::QuadratureFailure {
                tolerance: tol,
                estimate: error,
            });
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a
            || mid >= worst.b
            || (worst.b - worst.a) < 1e3 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE)
        {
            settled.push(worst);
            continue;
        }
        let (v1, e1, a1) = kronrod15(&f, worst.a, mid);
        let (v2, e2, a2) = kronrod15(&f, mid, worst.b);
        value = value - worst.value + v1 + v2;
        error += e1 + e2 - worst.error;
        abs_value += a1 + a2 - worst.abs_value;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            abs_value: a1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            abs_value: a2,
        });
        count += 1;
        if count % 64 == 0 {
            (value, error, abs_value) = totals(&heap, &settled);
        }
    }
    let (value, error, _) = totals(&heap, &settled);
    Ok(QuadResult {
        value,
        error,
        intervals: count,
    })
}

/// Convenience wrapper for a single interval.
pub fn integrate<T, F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_partitioned(f, &[a, b], cfg)
}
