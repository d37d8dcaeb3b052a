//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::collections::BinaryHeap;

use crate::error::{IbtError, Result};

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
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for [`integrate`]. The loop stops once the estimated error is
/// below `max(abs, rel * |I|)`.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs: 1e-14,
            rel: 1e-13,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn new(abs: f64, rel: f64) -> Self {
        QuadOptions {
            abs,
            rel,
            ..Default::default()
        }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
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
        self.err.total_cmp(&other.err)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Piece {
        a,
        b,
        value: kron * half,
        err: ((kron - gauss) * half).abs(),
    }
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(IbtError::invalid("quadrature bounds", "must be finite"));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let first = kronrod(&f, lo, hi);
    let mut total = first.value;
    let mut total_err = first.err;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    while total_err > opts.abs.max(opts.rel * total.abs()) {
        if heap.len() >= opts.max_intervals {
            return Err(IbtError::numeric(
                "quadrature",
                format!("no convergence on [{lo}, {hi}]: error estimate {total_err:e}"),
            ));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution
            heap.push(Piece { err: 0.0, ..worst });
            total_err = heap.iter().map(|p| p.err).sum();
            continue;
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        if heap.len() % 64 == 0 {
            // refresh running sums to keep cancellation error out of them
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    Ok(sign * value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_and_smooth_functions() {
        let opts = QuadOptions::default();
        let v = integrate(|t| 1.0 - t, 0.0, 1.0, opts).unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-14);
        let v = integrate(|t| t.exp(), 0.0, 2.0, opts).unwrap();
        assert_relative_eq!(v, 2f64.exp() - 1.0, max_relative = 1e-13);
        let v = integrate(|t| t * (1.0 - t), 0.0, 1.0, opts).unwrap();
        assert_relative_eq!(v, 1.0 / 6.0, max_relative = 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(|t| 1.0 / t.sqrt(), 0.0, 1.0, QuadOptions::new(1e-12, 1e-12)).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let v = integrate(|t| t * t, 1.0, 0.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(v, -1.0 / 3.0, max_relative = 1e-14);
    }
}
