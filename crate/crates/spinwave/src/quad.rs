//! Globally adaptive Gauss-Kronrod (7/15) quadrature for complex integrands,
//! and a nested 2D rule built on it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

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
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-6,
            abs_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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

/// ∫_a^b f(x) dx, bisecting the interval with the largest error estimate
/// until the total estimate meets the tolerance.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("quadrature limits must be finite"));
    }
    if a == b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        });
    }
    let (v, e) = kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    loop {
        let tol = (opts.rel_tol * total.norm()).max(opts.abs_tol);
        if err <= tol {
            return Ok(QuadResult { value: total, error: err });
        }
        if heap.len() >= opts.max_intervals {
            break;
        }
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.a + seg.b);
        let (v1, e1) = kronrod(&f, seg.a, mid);
        let (v2, e2) = kronrod(&f, mid, seg.b);
        total += v1 + v2 - seg.value;
        err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
    // recompute the sum cleanly before reporting
    let value: Complex64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Err(Error::Quadrature {
        achieved: error / value.norm().max(f64::MIN_POSITIVE),
        requested: opts.rel_tol,
    })
}

/// ∫∫ f(x, y) dy dx over a rectangle. The inner integrals run at a tenth of
/// the outer tolerance.
pub fn integrate_2d<F: Fn(f64, f64) -> Complex64>(
    f: F,
    x: (f64, f64),
    y: (f64, f64),
    opts: QuadOptions,
) -> Result<QuadResult> {
    let inner_opts = QuadOptions {
        rel_tol: 0.1 * opts.rel_tol,
        abs_tol: 0.1 * opts.abs_tol,
        ..opts
    };
    let failure = std::cell::RefCell::new(None);
    let outer = integrate(
        |xv| match integrate(|yv| f(xv, yv), y.0, y.1, inner_opts) {
            Ok(r) => r.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        x.0,
        x.1,
        opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    outer
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_and_oscillator() {
        let r = integrate(|x| Complex64::new((-x * x).exp(), 0.0), -8.0, 8.0, QuadOptions::default())
            .unwrap();
        assert!((r.value.re - std::f64::consts::PI.sqrt()).abs() < 1e-10);
        // ∫ e^{-x²} e^{ikx} = √π e^{-k²/4}
        let k = 5.0;
        let r = integrate(
            |x| Complex64::new(0.0, k * x).exp() * (-x * x).exp(),
            -8.0,
            8.0,
            QuadOptions::default(),
        )
        .unwrap();
        let exact = std::f64::consts::PI.sqrt() * (-k * k / 4.0).exp();
        assert!((r.value.re - exact).abs() < 1e-9 * exact.max(1e-3));
    }

    #[test]
    fn two_dimensional() {
        let r = integrate_2d(
            |x, y| Complex64::new((-x * x - 2.0 * y * y).exp(), 0.0),
            (-8.0, 8.0),
            (-8.0, 8.0),
            QuadOptions::default(),
        )
        .unwrap();
        let exact = std::f64::consts::PI / 2f64.sqrt();
        assert!((r.value.re / exact - 1.0).abs() < 1e-8);
    }

    #[test]
    fn reports_nonconvergence() {
        let opts = QuadOptions {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_intervals: 3,
        };
        let r = integrate(|x| Complex64::new((1.0 / (x + 1e-9)).sin(), 0.0), 0.0, 1.0, opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
