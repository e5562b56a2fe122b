//! Dormand–Prince 5(4) integrator for autonomous systems.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// State vectors the integrator can work with.
pub trait OdeState: Clone + Add<Output = Self> + Mul<f64, Output = Self> {
    /// Scaled error norm `max |e_i| / (atol + rtol * max(|y_i|, |z_i|))`.
    fn error_norm(err: &Self, y: &Self, z: &Self, rtol: f64, atol: f64) -> f64;
    fn is_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn error_norm(err: &Self, y: &Self, z: &Self, rtol: f64, atol: f64) -> f64 {
        err.abs() / (atol + rtol * y.abs().max(z.abs()))
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl OdeState for super::series::Series {
    fn error_norm(err: &Self, y: &Self, z: &Self, rtol: f64, atol: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..err.len() {
            let scale = atol + rtol * y.coeff(k).abs().max(z.coeff(k).abs());
            worst = worst.max(err.coeff(k).abs() / scale);
        }
        worst
    }
    fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 200_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OdeSolution<S> {
    pub y: S,
    pub steps: usize,
    /// Crude global error bound: accumulated accepted local error norms times `atol`.
    pub err_estimate: f64,
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `y' = rhs(y)` from 0 to `t_end` starting at `y0`.
pub fn dopri5<S, F>(mut rhs: F, y0: S, t_end: f64, opts: OdeOptions) -> Result<OdeSolution<S>>
where
    S: OdeState,
    F: FnMut(&S) -> Result<S>,
{
    if t_end == 0.0 {
        return Ok(OdeSolution {
            y: y0,
            steps: 0,
            err_estimate: 0.0,
        });
    }
    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = rhs(&y)?;
    let mut h = initial_step(&y, &k1, t_end, opts);
    let mut steps = 0;
    let mut err_sum = 0.0;
    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::StepFailure { t });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        let y2 = y.clone() + k1.clone() * (h * A21);
        let k2 = rhs(&y2)?;
        let y3 = y.clone() + k1.clone() * (h * A31) + k2.clone() * (h * A32);
        let k3 = rhs(&y3)?;
        let y4 =
            y.clone() + k1.clone() * (h * A41) + k2.clone() * (h * A42) + k3.clone() * (h * A43);
        let k4 = rhs(&y4)?;
        let y5 = y.clone()
            + k1.clone() * (h * A51)
            + k2.clone() * (h * A52)
            + k3.clone() * (h * A53)
            + k4.clone() * (h * A54);
        let k5 = rhs(&y5)?;
        let y6 = y.clone()
            + k1.clone() * (h * A61)
            + k2 * (h * A62)
            + k3.clone() * (h * A63)
            + k4.clone() * (h * A64)
            + k5.clone() * (h * A65);
        let k6 = rhs(&y6)?;
        let ynew = y.clone()
            + k1.clone() * (h * B1)
            + k3.clone() * (h * B3)
            + k4.clone() * (h * B4)
            + k5.clone() * (h * B5)
            + k6.clone() * (h * B6);
        let k7 = rhs(&ynew)?;
        let err = k1.clone() * (h * E1)
            + k3 * (h * E3)
            + k4 * (h * E4)
            + k5 * (h * E5)
            + k6 * (h * E6)
            + k7.clone() * (h * E7);
        let norm = S::error_norm(&err, &y, &ynew, opts.rtol, opts.atol);
        if !norm.is_finite() || !ynew.is_finite() {
            h *= 0.25;
            if h < 1e-14 * t_end.max(1.0) {
                return Err(Error::StepFailure { t });
            }
            continue;
        }
        if norm <= 1.0 {
            t += h;
            y = ynew;
            k1 = k7;
            steps += 1;
            err_sum += norm * opts.atol;
            let factor = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            h *= (0.9 * norm.powf(-0.2)).clamp(0.1, 1.0);
            if h < 1e-14 * t_end.max(1.0) {
                return Err(Error::StepFailure { t });
            }
        }
    }
    Ok(OdeSolution {
        y,
        steps,
        err_estimate: err_sum,
    })
}

fn initial_step<S: OdeState>(y: &S, f0: &S, t_end: f64, opts: OdeOptions) -> f64 {
    let zero = y.clone() * 0.0;
    let d0 = S::error_norm(y, &zero, &zero, 0.0, 1.0).max(1e-5);
    let d1 = S::error_norm(f0, &zero, &zero, 0.0, 1.0).max(1e-5);
    let h = 0.01 * d0 / d1 * opts.rtol.powf(0.2) * 10.0;
    h.min(t_end).max(1e-6 * t_end.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::series::Series;

    #[test]
    fn exponential_decay() {
        let sol = dopri5(|y: &f64| Ok(-y), 1.0, 5.0, OdeOptions::default()).unwrap();
        assert!((sol.y - (-5f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn logistic_against_closed_form() {
        // y' = y(1-y), y(0)=0.1
        let sol = dopri5(|y: &f64| Ok(y * (1.0 - y)), 0.1, 3.0, OdeOptions::default()).unwrap();
        let e = 3f64.exp();
        let exact = 0.1 * e / (1.0 - 0.1 + 0.1 * e);
        assert!((sol.y - exact).abs() < 1e-12);
    }

    #[test]
    fn series_state_propagates_jets() {
        // y' = -y with y(0) = c + h gives e^{-t}(c + h).
        let y0 = Series::variable(2.0, 3);
        let sol = dopri5(|y: &Series| Ok(-y.clone()), y0, 1.0, OdeOptions::default()).unwrap();
        let e = (-1f64).exp();
        assert!((sol.y.coeff(0) - 2.0 * e).abs() < 1e-12);
        assert!((sol.y.coeff(1) - e).abs() < 1e-12);
        assert!(sol.y.coeff(2).abs() < 1e-14);
    }
}
