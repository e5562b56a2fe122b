//! A small arithmetic abstraction so that offspring laws can be evaluated on
//! real numbers, complex numbers and truncated Taylor series with one code path.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// Field-like values on which a generating function can be evaluated.
pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// The constant `c` in the same shape as `self` (same series length, etc).
    fn constant(&self, c: f64) -> Self;
    fn powf(&self, a: f64) -> Self;
    fn powi(&self, n: u32) -> Self {
        let mut acc = self.constant(1.0);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            n >>= 1;
            if n > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
}

/// Point types (not series): values with a modulus, usable as quadrature output
/// and as evaluation points of kernels.
pub trait Point: Scalar + Copy + Send + Sync {
    fn from_real(x: f64) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn modulus(self) -> f64;
    /// Distance to a real point.
    fn dist(self, c: f64) -> f64 {
        (self - c).modulus()
    }
    fn zero() -> Self {
        Self::from_real(0.0)
    }
}

impl Scalar for f64 {
    fn constant(&self, c: f64) -> Self {
        c
    }
    fn powf(&self, a: f64) -> Self {
        f64::powf(*self, a)
    }
    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
}

impl Point for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn constant(&self, c: f64) -> Self {
        Complex64::new(c, 0.0)
    }
    fn powf(&self, a: f64) -> Self {
        Complex64::powf(*self, a)
    }
    fn powi(&self, n: u32) -> Self {
        Complex64::powi(self, n as i32)
    }
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn ln(&self) -> Self {
        Complex64::ln(*self)
    }
}

impl Point for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}
