//! Second-order asymptotics of the critical process.
//!
//! With `m2 = f''(1)/2`, `m3 = f'''(1)/6`:
//!
//! `1/(1 - F_t(s)) = m2 t + (m3/m2) ln(1 - F_t(s)) + A(s) + o(1)`,
//! `A(s) = 1/(1-s) - (m3/m2) ln(1-s) - m2 int_s^1 psi_{1,1}`,
//!
//! so that
//!
//! `1 - F_t(s) = 1/(m2 t) + (m3/m2^3) ln t / t^2 - (A(s) - (m3/m2) ln m2)/(m2^2 t^2) + o(t^-2)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::koenigs::{extraction_grid, EXTRACTION_TOL};
use crate::numeric::cauchy::certified_coefficients;
use crate::psi::{Integrability, PsiKernel, PsiMode};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalExpansion {
    pub m2: f64,
    pub m3: f64,
    /// `A(0)`.
    pub a0: f64,
    /// `h_1..h_n` with `t^2 P(Z_t = k) -> h_k`.
    pub h: Vec<f64>,
    #[serde(skip)]
    kernel: Option<PsiKernel>,
}

pub fn critical_expansion(kernel: &PsiKernel, n: usize) -> Result<CriticalExpansion> {
    if kernel.mode() != PsiMode::Critical {
        return Err(Error::Regime(
            "critical expansion needs a critical law".into(),
        ));
    }
    if kernel.integrable_to_r() != Integrability::Integrable {
        return Err(Error::Divergent(
            "critical expansion needs sum p_k k^3 ln k < inf".into(),
        ));
    }
    let (m2, m3) = kernel.m2_m3();
    let a0 = 1.0 - m2 * kernel.integral(0.0, 1.0)?;
    let h = if n == 0 {
        Vec::new()
    } else {
        let (nodes, rho) = extraction_grid(n, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let g = |z: Complex64| {
            let int = kernel.integral_segment(0.0, z)?;
            Ok(z / (m2 * m2 * (one - z)) - (one - z).ln() * (m3 / (m2 * m2 * m2)) + int / m2)
        };
        let mut c = certified_coefficients(g, rho, nodes, n + 1, EXTRACTION_TOL)?;
        c.remove(0);
        c
    };
    Ok(CriticalExpansion {
        m2,
        m3,
        a0,
        h,
        kernel: Some(kernel.clone()),
    })
}

impl CriticalExpansion {
    /// `A(s)` on `[0, 1)`.
    pub fn a(&self, s: f64) -> Result<f64> {
        let kernel = self
            .kernel
            .as_ref()
            .ok_or_else(|| Error::Spec("expansion was deserialised without its kernel".into()))?;
        if !(0.0..1.0).contains(&s) {
            return Err(Error::Domain {
                value: s,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let int = kernel.integral(s, 1.0)?;
        Ok(1.0 / (1.0 - s) - self.m3 / self.m2 * (-s).ln_1p() - self.m2 * int)
    }

    /// Magnitudes `(1/m2, m3/m2^3, A(0)/m2^2)` of the `1/t`, `ln t/t^2` and
    /// `1/t^2` terms of `P(Z_t > 0)` as they appear with `A(s)` alone.
    pub fn survival_coefficients(&self) -> [f64; 3] {
        let m2 = self.m2;
        [1.0 / m2, self.m3 / (m2 * m2 * m2), self.a0 / (m2 * m2)]
    }

    /// Full `1/t^2` coefficient of `1 - F_t(s)`.
    pub fn constant_term(&self, s: f64) -> Result<f64> {
        let a = if s == 0.0 { self.a0 } else { self.a(s)? };
        Ok(-(a - self.m3 / self.m2 * self.m2.ln()) / (self.m2 * self.m2))
    }

    /// Three-term approximation of `1 - F_t(s)`.
    pub fn one_minus_f(&self, t: f64, s: f64) -> Result<f64> {
        let m2 = self.m2;
        Ok(1.0 / (m2 * t)
            + self.m3 / (m2 * m2 * m2) * t.ln() / (t * t)
            + self.constant_term(s)? / (t * t))
    }

    /// `h_k`, `k >= 1`.
    pub fn h(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.h.get(i).copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::OffspringLaw;
    use crate::transition::{f_ode, FtAnalytic};
    use crate::Analytic;

    fn critical_mlf() -> OffspringLaw {
        OffspringLaw::mlf(0.5, 0.125, 0.0, 0.25).unwrap()
    }

    #[test]
    fn mlf_coefficients() {
        let k = PsiKernel::new(&critical_mlf()).unwrap();
        let e = critical_expansion(&k, 20).unwrap();
        let [c1, c2, c3] = e.survival_coefficients();
        assert!((c1 - 1.5).abs() < 1e-14 && (c2 - 0.75).abs() < 1e-14 && (c3 - 2.25).abs() < 1e-13);
        assert_eq!(e.a0, 1.0);
        let (p0, p) = (0.5, 0.25);
        for k in 1..=20 {
            let kf = k as f64;
            let expected = (1.0 - p) / (p0 * p0) * (1.0 - p * (kf - 1.0) / kf);
            assert!((e.h(k).unwrap() - expected).abs() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn survival_against_long_time_transition() {
        let law = critical_mlf();
        let e = critical_expansion(&PsiKernel::new(&law).unwrap(), 0).unwrap();
        let t = 1e4;
        let surv = 1.0 - f_ode(&law, t, 0.0).unwrap().value;
        let c = e.constant_term(0.0).unwrap();
        let seen = t * t * (surv - 1.5 / t - 0.75 * t.ln() / (t * t));
        assert!(((seen - c) / c).abs() < 0.02, "{seen} vs {c}");
    }

    #[test]
    fn trifurcation_h_against_transition() {
        let p3 = 0.2;
        let law = OffspringLaw::trifurcation(0.6, 0.2, p3).unwrap();
        let kernel = PsiKernel::new(&law).unwrap();
        let e = critical_expansion(&kernel, 6).unwrap();
        let t = 1e4;
        let jet = FtAnalytic::new(&law, t).unwrap().jet(0.0, 7).unwrap();
        for k in 1..=6 {
            let seen = t * t * jet.coeff(k);
            let h = e.h(k).unwrap();
            assert!(((seen - h) / h).abs() < 5e-3, "k = {k}: {seen} vs {h}");
        }
        // A(s) against its closed form for this family.
        let m2 = (1.0 + 3.0 * p3) / 2.0;
        let s = 0.4;
        let int = 4.0 * p3 / (1.0 + 3.0 * p3).powi(2)
            * ((1.0 + 3.0 * p3) / (1.0 + p3 + 2.0 * p3 * s)).ln();
        let expected = 1.0 / (1.0 - s) - p3 / m2 * (1.0 - s).ln() - m2 * int;
        assert!((e.a(s).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn wrong_regime() {
        let k = PsiKernel::new(&OffspringLaw::finite(vec![0.4, 0.0, 0.4], 0.2).unwrap()).unwrap();
        assert!(matches!(critical_expansion(&k, 4), Err(Error::Regime(_))));
    }
}
