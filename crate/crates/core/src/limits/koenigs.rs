//! The linearising function `K`, survival asymptotics and the Yaglom law.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma as gamma_fn;

use crate::error::{Error, Result};
use crate::numeric::cauchy::certified_coefficients;
use crate::psi::{PsiKernel, PsiMode};

fn require_noncritical(kernel: &PsiKernel) -> Result<()> {
    if kernel.mode() == PsiMode::Critical {
        return Err(Error::Regime("K needs q < r".into()));
    }
    Ok(())
}

fn require_r_above_one(kernel: &PsiKernel) -> Result<()> {
    require_noncritical(kernel)?;
    if kernel.profile().r <= 1.0 {
        return Err(Error::Regime(format!(
            "needs r > 1 (r = {})",
            kernel.profile().r
        )));
    }
    Ok(())
}

/// `K(s) = (s - q) (r - q)^gamma (r - s)^{-gamma} exp(-int_q^s psi)` on `[0, r)`.
///
/// `K(F_t(s)) = e^{-alpha t} K(s)`.
pub fn koenigs(kernel: &PsiKernel, s: f64) -> Result<f64> {
    require_noncritical(kernel)?;
    let p = kernel.profile();
    if !(0.0..p.r).contains(&s) {
        return Err(Error::Domain {
            value: s,
            lo: 0.0,
            hi: p.r,
        });
    }
    if s == p.q {
        return Ok(0.0);
    }
    let g = p.gamma;
    let int = kernel.integral(p.q, s)?;
    Ok((s - p.q) * ((p.r - p.q) / (p.r - s)).powf(g) * (-int).exp())
}

/// `K` at a complex point of the disc `|z| < r`.
pub fn koenigs_complex(kernel: &PsiKernel, z: Complex64) -> Result<Complex64> {
    require_noncritical(kernel)?;
    let p = kernel.profile();
    if z.norm() >= p.r {
        return Err(Error::Domain {
            value: z.norm(),
            lo: 0.0,
            hi: p.r,
        });
    }
    let int = kernel.integral_segment(p.q, z)?;
    let ratio = Complex64::new(p.r - p.q, 0.0) / (Complex64::new(p.r, 0.0) - z);
    Ok((z - p.q) * ratio.powf(p.gamma) * (-int).exp())
}

/// Two-term expansion of `P(T > t) = F_t(1) - F_t(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalExpansion {
    pub k0: f64,
    pub k1: f64,
    /// `(K(1) - K(0)) e^{-alpha t}`.
    pub leading: f64,
    /// `-(f''(q)/(2 alpha)) (K(1)^2 - K(0)^2) e^{-2 alpha t}`.
    pub second: f64,
    pub value: f64,
}

pub fn survival_expansion(kernel: &PsiKernel, t: f64) -> Result<SurvivalExpansion> {
    require_r_above_one(kernel)?;
    let p = kernel.profile();
    let k0 = koenigs(kernel, 0.0)?;
    let k1 = koenigs(kernel, 1.0)?;
    let e = (-p.alpha * t).exp();
    let curvature = kernel.law().derivative(p.q, 2)? / (2.0 * p.alpha);
    let leading = (k1 - k0) * e;
    let second = -curvature * (k1 * k1 - k0 * k0) * e * e;
    Ok(SurvivalExpansion {
        k0,
        k1,
        leading,
        second,
        value: leading + second,
    })
}

/// Constants of `pi_k ~ c k^{gamma - 1} r^{-k}` (linear-fractional type laws).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YaglomTail {
    pub c: f64,
    pub gamma: f64,
    pub r: f64,
}

impl YaglomTail {
    pub fn approx(&self, k: usize) -> f64 {
        let k = k as f64;
        self.c * k.powf(self.gamma - 1.0) * self.r.powf(-k)
    }
}

/// Limit law of `Z_t` given `T > t`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct YaglomLaw {
    pub k0: f64,
    pub k1: f64,
    /// `pi_1..pi_n`.
    pub coefficients: Vec<f64>,
    /// Radius of the extraction circle.
    pub rho: f64,
    pub tail: Option<YaglomTail>,
    #[serde(skip)]
    kernel: Option<PsiKernel>,
}

impl YaglomLaw {
    /// `pi_k`, `k >= 1`.
    pub fn pi(&self, k: usize) -> Option<f64> {
        k.checked_sub(1)
            .and_then(|i| self.coefficients.get(i).copied())
    }

    /// `(K(s) - K(0)) / (K(1) - K(0))`.
    pub fn pgf(&self, s: f64) -> Result<f64> {
        let kernel = self
            .kernel
            .as_ref()
            .ok_or_else(|| Error::Spec("law was deserialised without its kernel".into()))?;
        Ok((koenigs(kernel, s)? - self.k0) / (self.k1 - self.k0))
    }
}

/// Node count and circle radius used for `n` coefficients of a function with
/// singularity at `r`.
pub(crate) fn extraction_grid(n: usize, r: f64) -> (usize, f64) {
    let nodes = (8 * n).max(4096).next_power_of_two();
    let rho = r * (1.0 - 8.0 / n.max(16) as f64).max(0.5);
    (nodes, rho)
}

pub const EXTRACTION_TOL: f64 = 1e-9;

pub fn yaglom(kernel: &PsiKernel, n: usize) -> Result<YaglomLaw> {
    require_r_above_one(kernel)?;
    let p = *kernel.profile();
    let k0 = koenigs(kernel, 0.0)?;
    let k1 = koenigs(kernel, 1.0)?;
    let norm = k1 - k0;
    let (nodes, rho) = extraction_grid(n, p.r);
    let g = |z: Complex64| Ok((koenigs_complex(kernel, z)? - k0) / norm);
    let mut coefficients = certified_coefficients(g, rho, nodes, n + 1, EXTRACTION_TOL)?;
    coefficients.remove(0);
    let tail = kernel.is_identically_zero().then(|| {
        let c_gamma = gamma_fn(p.gamma) * (p.q + (1.0 - p.q) * (1.0 - 1.0 / p.r).powf(-p.gamma));
        YaglomTail {
            c: (p.r - p.q) / c_gamma,
            gamma: p.gamma,
            r: p.r,
        }
    });
    Ok(YaglomLaw {
        k0,
        k1,
        coefficients,
        rho,
        tail,
        kernel: Some(kernel.clone()),
    })
}
