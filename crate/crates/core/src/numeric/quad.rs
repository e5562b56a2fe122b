//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The integrand is real-parameterised but may be complex valued, which is how
//! contour segments are integrated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::scalar::Point;
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
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            rel_tol: 1e-13,
            max_panels: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
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

fn gk15<T, F>(f: &mut F, a: f64, b: f64) -> Result<Panel<T>>
where
    T: Point,
    F: FnMut(f64) -> Result<T>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let f1 = f(c - h * x)?;
        let f2 = f(c + h * x)?;
        let s = f1 + f2;
        kron = kron + s * WGK[i];
        if i % 2 == 1 {
            gauss = gauss + s * WG[i / 2];
        }
    }
    let value = kron * h;
    let error = ((kron - gauss) * h).modulus();
    Ok(Panel { a, b, value, error })
}

/// Integrate `f` over `[a, b]` (either orientation).
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult<T>>
where
    T: Point,
    F: FnMut(f64) -> Result<T>,
{
    if a == b {
        return Ok(QuadResult {
            value: T::zero(),
            error: 0.0,
            panels: 0,
        });
    }
    if b < a {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    let first = gk15(&mut f, a, b)?;
    let mut total_err = first.error;
    let mut total = first.value;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    // Panels too narrow to split in floating point are frozen with their estimate.
    let mut frozen: Vec<Panel<T>> = Vec::new();
    let mut panels = 1;
    let floor = 64.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    while total_err > opts.abs_tol.max(opts.rel_tol * total.modulus()) {
        if panels >= opts.max_panels {
            return Err(Error::Quadrature {
                estimate: total.re(),
                error: total_err,
            });
        }
        let Some(worst) = heap.pop() else { break };
        if worst.b - worst.a <= floor {
            frozen.push(worst);
            continue;
        }
        let m = 0.5 * (worst.a + worst.b);
        let left = gk15(&mut f, worst.a, m)?;
        let right = gk15(&mut f, m, worst.b)?;
        total = total - worst.value + left.value + right.value;
        total_err = total_err - worst.error + left.error + right.error;
        heap.push(left);
        heap.push(right);
        panels += 1;
        if panels % 64 == 0 {
            // Refresh sums to avoid drift from repeated subtraction.
            total = heap
                .iter()
                .chain(&frozen)
                .fold(T::zero(), |acc, p| acc + p.value);
            total_err = heap.iter().chain(&frozen).map(|p| p.error).sum();
        }
    }
    let value = heap
        .iter()
        .chain(&frozen)
        .fold(T::zero(), |acc, p| acc + p.value);
    let error = heap.iter().chain(&frozen).map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        error,
        panels,
    })
}

/// Convenience wrapper with default options returning only the value.
pub fn integrate_default<T, F>(f: F, a: f64, b: f64) -> Result<T>
where
    T: Point,
    F: FnMut(f64) -> Result<T>,
{
    integrate(f, a, b, QuadOptions::default()).map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn polynomial_is_exact() {
        let v: f64 = integrate_default(|x| Ok(x * x * x - 2.0 * x), 0.0, 2.0).unwrap();
        assert!((v - 0.0).abs() < 1e-14);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v: f64 = integrate_default(|x| Ok(x.exp()), 1.0, 0.0).unwrap();
        assert!((v + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn sqrt_endpoint_singularity_converges() {
        let v: f64 = integrate_default(|x: f64| Ok(x.sqrt()), 0.0, 1.0).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn complex_integrand() {
        // \int_0^{2\pi} e^{ix} dx = 0, \int_0^1 e^{ix} dx = (e^i - 1)/i
        let v: Complex64 =
            integrate_default(|x| Ok(Complex64::new(0.0, x).exp()), 0.0, 1.0).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let expected = (i.exp() - 1.0) / i;
        assert!((v - expected).norm() < 1e-14);
    }
}
