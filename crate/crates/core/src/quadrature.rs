//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error estimate drops below the absolute tolerance. Final sums run over
//! the subintervals in left-to-right order with pairwise summation, so the
//! result does not depend on the order in which intervals were refined.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kronrod nodes on [0, 1]; odd indices are the Gauss nodes.
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
    0.209_482_141_084_728,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl QuadOptions {
    pub fn new(abs_tol: f64) -> Self {
        QuadOptions { abs_tol, max_intervals: 2000 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
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
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Segment { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

/// Pairwise (cascade) summation; the tree shape depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Integrates `f` over `[a, b]` to an absolute tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integration limits [{a}, {b}] must be finite")));
    }
    if opts.abs_tol.is_nan() || opts.abs_tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance {} must be positive", opts.abs_tol)));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    if b < a {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }

    let mut heap = BinaryHeap::new();
    let first = gk15(&mut f, a, b);
    let mut total_error = first.error;
    heap.push(first);
    let mut evaluations = 15;

    while total_error > opts.abs_tol {
        if heap.len() >= opts.max_intervals {
            return Err(Error::Convergence(format!(
                "quadrature on [{a}, {b}] stalled at error {total_error:.3e} after {} intervals",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Convergence(format!("interval [{}, {}] cannot be bisected further", worst.a, worst.b)));
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if !total_error.is_finite() {
            return Err(Error::Convergence(format!("non-finite integrand on [{a}, {b}]")));
        }
    }

    let mut segments = heap.into_vec();
    segments.sort_unstable_by(|x, y| x.a.total_cmp(&y.a));
    let values: Vec<f64> = segments.iter().map(|s| s.value).collect();
    let errors: Vec<f64> = segments.iter().map(|s| s.error).collect();
    Ok(QuadResult { value: pairwise_sum(&values), abs_error: pairwise_sum(&errors), evaluations })
}

/// Integrates over consecutive pieces `[breaks[i], breaks[i+1]]`, splitting
/// the tolerance evenly between them.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    if breaks.len() < 2 {
        return Err(Error::Domain("need at least two break points".into()));
    }
    let pieces = breaks.len() - 1;
    let piece_opts = QuadOptions { abs_tol: opts.abs_tol / pieces as f64, ..opts };
    let mut values = Vec::with_capacity(pieces);
    let mut errors = Vec::with_capacity(pieces);
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        let r = integrate(&mut f, w[0], w[1], piece_opts)?;
        values.push(r.value);
        errors.push(r.abs_error);
        evaluations += r.evaluations;
    }
    Ok(QuadResult { value: pairwise_sum(&values), abs_error: pairwise_sum(&errors), evaluations })
}
