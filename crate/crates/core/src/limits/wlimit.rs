//! Laplace transform `eta(rho) = E e^{-rho W}` of the martingale limit
//! `W = lim Z_t e^{-(m1 - 1) t}` of a supercritical process with `f(1) = 1`.

use serde::{Deserialize, Serialize};

use crate::divdiff::tail_gf;
use crate::error::{Error, Result};
use crate::law::OffspringLaw;
use crate::numeric::quad::{integrate, QuadOptions};
use crate::numeric::root::brent;
use crate::profile::{ExtendableProfile, Regime};
use crate::psi::{Integrability, PsiKernel};

fn require_supercritical(prof: &ExtendableProfile) -> Result<()> {
    if prof.regime != Regime::Supercritical {
        return Err(Error::Regime(format!(
            "W transform needs q < 1 = r (regime {:?})",
            prof.regime
        )));
    }
    if !prof.beta_is_finite() {
        return Err(Error::Divergent("W transform needs a finite mean".into()));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Domain {
            value: rho,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(())
}

/// Bracket for `v = ln sigma`, `1 - eta = (1 - q) sigma`.
const V_LO: f64 = -700.0;
const V_HI: f64 = -1.2e-16;
const V_TOL: f64 = 1e-15;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WTransform {
    pub q: f64,
    pub gamma: f64,
    /// `sum p_k k ln k = inf`: then `W = 0` and `eta = 1`.
    pub degenerate: bool,
    #[serde(skip)]
    kernel: Option<PsiKernel>,
}

pub fn w_transform(kernel: &PsiKernel) -> Result<WTransform> {
    let prof = kernel.profile();
    require_supercritical(prof)?;
    let degenerate = match kernel.integrable_to_r() {
        Integrability::Integrable => false,
        Integrability::Divergent => true,
        Integrability::Unknown => {
            return Err(Error::Divergent(
                "cannot decide the x log x condition for this law".into(),
            ))
        }
    };
    Ok(WTransform {
        q: prof.q,
        gamma: prof.gamma,
        degenerate,
        kernel: Some(kernel.clone()),
    })
}

impl WTransform {
    fn kernel(&self) -> Result<&PsiKernel> {
        self.kernel
            .as_ref()
            .ok_or_else(|| Error::Spec("transform was deserialised without its kernel".into()))
    }

    /// `(1 - eta(rho))/(1 - q)`, solved from
    /// `eta = q + (1 - q) ((1 - eta)/rho)^gamma exp(-int_eta^1 psi_{q,1})`.
    pub fn sigma(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        if rho == 0.0 || self.degenerate {
            return Ok(0.0);
        }
        let kernel = self.kernel()?;
        let (q, gamma) = (self.q, self.gamma);
        let ln_scale = (1.0 - q).ln() - rho.ln();
        let g = |v: f64| -> Result<f64> {
            let sigma = v.exp();
            let int = kernel.integral(1.0 - (1.0 - q) * sigma, 1.0)?;
            Ok((-sigma).ln_1p() - gamma * (ln_scale + v) + int)
        };
        Ok(brent(g, V_LO, V_HI, V_TOL)?.exp())
    }

    pub fn eta(&self, rho: f64) -> Result<f64> {
        Ok(1.0 - (1.0 - self.q) * self.sigma(rho)?)
    }

    /// `E(e^{-rho W} | W > 0) = (eta - q)/(1 - q)`.
    pub fn conditional(&self, rho: f64) -> Result<f64> {
        if self.degenerate {
            return Err(Error::Divergent("W = 0 almost surely".into()));
        }
        Ok(1.0 - self.sigma(rho)?)
    }

    /// `(E W, E W^2)` from `g(rho) = (1 - eta(rho))/rho = E W - E W^2 rho/2 + ..`,
    /// interpolated at `rho = h, 2h, .., 6h` and evaluated at 0.
    pub fn moments(&self) -> Result<(f64, f64)> {
        if self.degenerate {
            return Ok((0.0, 0.0));
        }
        const H: f64 = 5e-3;
        const M: usize = 6;
        let xs: Vec<f64> = (1..=M).map(|i| i as f64 * H).collect();
        let mut ys = Vec::with_capacity(M);
        for &x in &xs {
            ys.push((1.0 - self.q) * self.sigma(x)? / x);
        }
        let (g0, g1) = lagrange_value_and_slope_at_zero(&xs, &ys);
        Ok((g0, -2.0 * g1))
    }

    /// `lim rho^gamma (eta(rho) - q) = (1 - q)^{1 + gamma} exp(-int_q^1 psi_{q,1})`.
    pub fn large_rho_constant(&self) -> Result<f64> {
        let kernel = self.kernel()?;
        let int = kernel.integral(self.q, 1.0)?;
        Ok((1.0 - self.q).powf(1.0 + self.gamma) * (-int).exp())
    }
}

/// Value and derivative at 0 of the interpolating polynomial through `(xs, ys)`.
fn lagrange_value_and_slope_at_zero(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let (mut value, mut slope) = (0.0, 0.0);
    for i in 0..n {
        let mut denom = 1.0;
        let mut at0 = 1.0;
        for j in (0..n).filter(|&j| j != i) {
            denom *= xs[i] - xs[j];
            at0 *= -xs[j];
        }
        let li0 = at0 / denom;
        // l_i'(0) = l_i(0) * sum_j 1/(0 - x_j)
        let dli0 = li0
            * (0..n)
                .filter(|&j| j != i)
                .map(|j| -1.0 / xs[j])
                .sum::<f64>();
        value += ys[i] * li0;
        slope += ys[i] * dli0;
    }
    (value, slope)
}

/// `eta(rho)` from `eta = 1 - rho exp(int_eta^1 ((m1 - 1)/(f(x) - x) + 1/(1 - x)) dx)`.
///
/// The integrand is evaluated as `-f[1,1,x]/(f[1,x] - 1)`.
pub fn w_transform_classical(
    law: &OffspringLaw,
    prof: &ExtendableProfile,
    rho: f64,
) -> Result<f64> {
    require_supercritical(prof)?;
    check_rho(rho)?;
    if rho == 0.0 {
        return Ok(1.0);
    }
    let q = prof.q;
    let integrand = |x: f64| -> Result<f64> {
        if x == 1.0 {
            let (m1, m2, _) = law.moments();
            return Ok(-m2 / (m1 - 1.0));
        }
        let f11x = tail_gf(law, &[1.0, 1.0, x])?;
        let f1x = tail_gf(law, &[1.0, x])?;
        Ok(-f11x / (f1x - 1.0))
    };
    let opts = QuadOptions::default();
    let g = |v: f64| -> Result<f64> {
        let sigma = v.exp();
        let eta = 1.0 - (1.0 - q) * sigma;
        let int = integrate(integrand, eta, 1.0, opts)?.value;
        Ok((1.0 - q).ln() + v - rho.ln() - int)
    };
    // The integrand is only resolved away from q; approach it gradually.
    let mut gap: f64 = 1e-4;
    let mut hi = (-gap).ln_1p();
    while g(hi)? <= 0.0 {
        gap *= 1e-2;
        if gap < 1e-12 {
            return Err(Error::Bracket(format!("classical equation at rho = {rho}")));
        }
        hi = (-gap).ln_1p();
    }
    let sigma = brent(g, V_LO, hi, V_TOL)?.exp();
    Ok(1.0 - (1.0 - q) * sigma)
}
