//! Adaptive Gauss–Kronrod (7/15) quadrature with global interval bisection.

use std::cmp::Ordering;
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-13, rel: 1e-11, max_intervals: 4000 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel, ..Self::default() }
    }
}

/// Integral value with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

struct Rule {
    value: f64,
    error: f64,
    abs: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Rule {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    let mut fv = [(0.0, 0.0); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        *slot = (f1, f2);
        kron += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kron * h;
    let abs = abs * h.abs();
    let asc = asc * h.abs();
    let mut error = ((kron - gauss) * h).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs);
    }
    Rule { value, error, abs }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn segment<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let r = gk15(f, a, b);
    Segment { a, b, value: r.value, error: r.error, abs: r.abs }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    integrate_breaks(f, &[a, b], tol)
}

/// Integrates `f` over `[points[0], points[last]]`, using the interior
/// points as initial interval boundaries.
pub fn integrate_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    if points.len() < 2 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] != w[0] {
            heap.push(segment(&f, w[0], w[1]));
        }
    }
    let mut frozen = Vec::new();
    loop {
        let (mut value, mut error, mut abs) = (0.0, 0.0, 0.0);
        for s in heap.iter().chain(frozen.iter()) {
            value += s.value;
            error += s.error;
            abs += s.abs;
        }
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonFinite {
                value,
                at: format!("quadrature on [{}, {}]", points[0], points[points.len() - 1]),
            });
        }
        let target = tol.abs.max(tol.rel * value.abs()).max(50.0 * f64::EPSILON * abs);
        if error <= target {
            return Ok(Estimate { value, error });
        }
        let count = heap.len() + frozen.len();
        let worst = match heap.pop() {
            Some(s) if count < tol.max_intervals => s,
            _ => {
                return Err(Error::Quadrature {
                    lo: points[0],
                    hi: points[points.len() - 1],
                    value,
                    error,
                    intervals: count,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            frozen.push(worst);
            continue;
        }
        heap.push(segment(&f, worst.a, mid));
        heap.push(segment(&f, mid, worst.b));
    }
}

/// Integrates `f` over `[a, ∞)` via `x = a + s / (1 - s)`.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<Estimate> {
    integrate(
        |s: f64| {
            let one_minus = 1.0 - s;
            let x = a + s / one_minus;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v / (one_minus * one_minus)
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = NeumaierSum::default();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Composite trapezoid rule on nodes `x` (strictly increasing).
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = NeumaierSum::default();
    for i in 1..x.len().min(y.len()) {
        acc.add(0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]));
    }
    acc.value()
}

/// Finds a root of a monotone function on `[lo, hi]` by bisection.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let flo = f(lo);
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
