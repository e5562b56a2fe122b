//! Truncated power series (Taylor jets).
//!
//! A `Series` of length `n` holds the coefficients `c_0..c_{n-1}` of
//! `sum c_k h^k`. Binary operations truncate to the shorter operand.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::{Point, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    coeffs: Vec<f64>,
}

impl Series {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        Self { coeffs }
    }

    /// The identity jet `c + h` truncated at `len` terms.
    pub fn variable(c: f64, len: usize) -> Self {
        let mut coeffs = vec![0.0; len.max(1)];
        coeffs[0] = c;
        if len > 1 {
            coeffs[1] = 1.0;
        }
        Self { coeffs }
    }

    pub fn constant_of_len(c: f64, len: usize) -> Self {
        let mut coeffs = vec![0.0; len.max(1)];
        coeffs[0] = c;
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn set_coeff(&mut self, k: usize, v: f64) {
        self.coeffs[k] = v;
    }

    /// Divide by `h^k`, assuming the first `k` coefficients vanish.
    pub fn shift_down(&self, k: usize) -> Self {
        assert!(k < self.coeffs.len(), "shift exhausts the series");
        Self {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    pub fn truncate(&self, len: usize) -> Self {
        Self {
            coeffs: self.coeffs[..len.min(self.coeffs.len())].to_vec(),
        }
    }

    /// Horner evaluation at offset `h` from the expansion point.
    pub fn eval<T: Point>(&self, h: T) -> T {
        let mut acc = T::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * h + c;
        }
        acc
    }

    /// Crude radius-of-convergence estimate from the decay of the tail
    /// coefficients; `f64::INFINITY` when the tail vanishes.
    pub fn radius_estimate(&self) -> f64 {
        let n = self.coeffs.len();
        let mut rho = f64::INFINITY;
        for k in (n / 2).max(1)..n {
            let c = self.coeffs[k].abs();
            if c > 0.0 {
                rho = rho.min(c.powf(-1.0 / k as f64));
            }
        }
        rho
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let n = self.len().min(other.len());
        Self {
            coeffs: (0..n)
                .map(|k| op(self.coeffs[k], other.coeffs[k]))
                .collect(),
        }
    }

    fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| op(c)).collect(),
        }
    }
}

impl Add for Series {
    type Output = Series;
    fn add(self, rhs: Series) -> Series {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(self, rhs: Series) -> Series {
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        let n = self.len().min(rhs.len());
        let a = &self.coeffs;
        let b = &rhs.coeffs;
        let coeffs = (0..n)
            .map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum())
            .collect();
        Series { coeffs }
    }
}

impl Div for Series {
    type Output = Series;
    fn div(self, rhs: Series) -> Series {
        let n = self.len().min(rhs.len());
        let a = &self.coeffs;
        let b = &rhs.coeffs;
        let mut q = vec![0.0; n];
        for k in 0..n {
            let mut acc = a[k];
            for i in 1..=k {
                acc -= b[i] * q[k - i];
            }
            q[k] = acc / b[0];
        }
        Series { coeffs: q }
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.map(|c| -c)
    }
}

impl Add<f64> for Series {
    type Output = Series;
    fn add(mut self, rhs: f64) -> Series {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Series {
    type Output = Series;
    fn sub(mut self, rhs: f64) -> Series {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for Series {
    type Output = Series;
    fn mul(self, rhs: f64) -> Series {
        self.map(|c| c * rhs)
    }
}

impl Div<f64> for Series {
    type Output = Series;
    fn div(self, rhs: f64) -> Series {
        self.map(|c| c / rhs)
    }
}

impl Scalar for Series {
    fn constant(&self, c: f64) -> Self {
        Series::constant_of_len(c, self.len())
    }

    fn powf(&self, alpha: f64) -> Self {
        let u = &self.coeffs;
        let n = u.len();
        let mut v = vec![0.0; n];
        v[0] = u[0].powf(alpha);
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (alpha * j as f64 - (k - j) as f64) * u[j] * v[k - j];
            }
            v[k] = acc / (k as f64 * u[0]);
        }
        Series { coeffs: v }
    }

    fn exp(&self) -> Self {
        let u = &self.coeffs;
        let n = u.len();
        let mut v = vec![0.0; n];
        v[0] = u[0].exp();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * u[j] * v[k - j];
            }
            v[k] = acc / k as f64;
        }
        Series { coeffs: v }
    }

    fn ln(&self) -> Self {
        let u = &self.coeffs;
        let n = u.len();
        let mut v = vec![0.0; n];
        v[0] = u[0].ln();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * v[j] * u[k - j];
            }
            v[k] = (u[k] - acc / k as f64) / u[0];
        }
        Series { coeffs: v }
    }
}
