//! Adaptive Gauss–Kronrod (7/15) quadrature for real and complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

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
// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Values that can be integrated: a vector space over the reals with a norm.
pub trait QuadValue: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 0.0, max_intervals: 2000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error: f64,
    pub intervals: usize,
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl<T> Eq for Segment<T> {}

impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Segment<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let pair = f(center - half * x) + f(center + half * x);
        kron = kron + pair * w;
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).magnitude();
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, options: QuadratureOptions) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_with_breakpoints(f, &[a, b], options)
}

/// Integrates `f` over `[points[0], points[last]]`, seeding the subdivision at
/// every interior point so that narrow features cannot be stepped over.
///
/// `points` must be sorted in increasing order and contain at least two entries.
pub fn integrate_with_breakpoints<T, F>(f: F, points: &[f64], options: QuadratureOptions) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if points.len() < 2 || points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("quadrature breakpoints must be strictly increasing".into()));
    }
    let mut heap: BinaryHeap<Segment<T>> = points.windows(2).map(|w| kronrod(&f, w[0], w[1])).collect();
    loop {
        let total = heap.iter().fold(T::default(), |acc, s| acc + s.value);
        let error: f64 = heap.iter().map(|s| s.error).sum();
        let target = options.abs_tol.max(options.rel_tol * total.magnitude());
        if error <= target || error == 0.0 {
            return Ok(QuadratureResult { value: total, error, intervals: heap.len() });
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if heap.len() + 2 > options.max_intervals || !(worst.a < mid && mid < worst.b) {
            heap.push(worst);
            return Err(Error::Quadrature { value: total.magnitude(), error });
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}
