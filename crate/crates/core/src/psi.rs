//! The kernels `psi_{q,r}` and `psi_{1,1}` and their integrals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::divdiff::tail_gf;
use crate::error::{Error, Result};
use crate::law::{LawKind, OffspringLaw};
use crate::numeric::quad::{integrate, QuadOptions};
use crate::numeric::Point;
use crate::profile::{profile, ExtendableProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiMode {
    NonCritical,
    Critical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrability {
    Integrable,
    Divergent,
    Unknown,
}

/// Families where the kernel has a closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
enum ClosedClass {
    /// Linear-fractional type: the kernel vanishes.
    Zero,
    /// Cubic law, `q < r`: `psi = (1 - gamma) p3 / phi(x)`, `phi(x) = p3 x + phi0`.
    Cubic {
        p3: f64,
        phi0: f64,
    },
    /// Cubic critical law: `psi_{1,1} = m3^2 / (m2^2 f3(x))`, `f3(x) = m2 - m3 (1 - x)`.
    CubicCritical,
    General,
}

#[derive(Clone, Debug)]
pub struct PsiKernel {
    law: OffspringLaw,
    prof: ExtendableProfile,
    mode: PsiMode,
    integrability: Integrability,
    class: ClosedClass,
    m2: f64,
    m3: f64,
}

fn is_linear_fractional_type(law: &OffspringLaw) -> bool {
    match law.kind() {
        LawKind::ModifiedLinearFractional { .. } => true,
        LawKind::MutationStopped { base, .. } => is_linear_fractional_type(base),
        _ => law.degree().is_some_and(|d| d <= 2),
    }
}

impl PsiKernel {
    pub fn new(law: &OffspringLaw) -> Result<Self> {
        let prof = profile(law)?;
        Self::with_profile(law, prof)
    }

    pub fn with_profile(law: &OffspringLaw, prof: ExtendableProfile) -> Result<Self> {
        let (_, m2, m3) = law.moments();
        let mode = if prof.is_critical() {
            if !m3.is_finite() {
                return Err(Error::Divergent(
                    "critical kernel needs f'''(1) < inf".into(),
                ));
            }
            PsiMode::Critical
        } else {
            if !prof.beta_is_finite() {
                return Err(Error::Divergent(
                    "kernel is undefined when f'(r) is infinite".into(),
                ));
            }
            PsiMode::NonCritical
        };
        let class = if is_linear_fractional_type(law) {
            ClosedClass::Zero
        } else if law.degree() == Some(3) {
            match mode {
                PsiMode::Critical => ClosedClass::CubicCritical,
                PsiMode::NonCritical => {
                    let p3 = law.coefficients(4)[3];
                    let phi0 = tail_gf(law, &[prof.q, prof.r, 0.0])?;
                    ClosedClass::Cubic { p3, phi0 }
                }
            }
        } else {
            ClosedClass::General
        };
        let moment = match mode {
            PsiMode::NonCritical => law.xlogx_moment(prof.r, 1),
            PsiMode::Critical => law.xlogx_moment(1.0, 3),
        };
        let integrability = if moment.is_finite() {
            Integrability::Integrable
        } else if moment == f64::INFINITY {
            Integrability::Divergent
        } else {
            Integrability::Unknown
        };
        Ok(Self {
            law: law.clone(),
            prof,
            mode,
            integrability,
            class,
            m2,
            m3,
        })
    }

    pub fn law(&self) -> &OffspringLaw {
        &self.law
    }

    pub fn profile(&self) -> &ExtendableProfile {
        &self.prof
    }

    pub fn mode(&self) -> PsiMode {
        self.mode
    }

    /// `(m2, m3)` of the law.
    pub fn m2_m3(&self) -> (f64, f64) {
        (self.m2, self.m3)
    }

    /// Upper end of the kernel's domain: `r`, or 1 in the critical mode.
    pub fn upper(&self) -> f64 {
        self.prof.r
    }

    pub fn is_identically_zero(&self) -> bool {
        self.class == ClosedClass::Zero
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !(0.0..=self.upper()).contains(&x) {
            return Err(Error::Domain {
                value: x,
                lo: 0.0,
                hi: self.upper(),
            });
        }
        Ok(())
    }

    pub fn psi(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        self.psi_at(x)
    }

    /// Kernel at a real or complex point, without domain checks.
    pub fn psi_at<T: Point>(&self, x: T) -> Result<T> {
        let (q, r, gamma) = (self.prof.q, self.prof.r, self.prof.gamma);
        match self.class {
            ClosedClass::Zero => Ok(T::zero()),
            ClosedClass::Cubic { p3, phi0 } => {
                Ok(T::from_real((1.0 - gamma) * p3) / (x * p3 + phi0))
            }
            ClosedClass::CubicCritical => {
                let (m2, m3) = (self.m2, self.m3);
                let f3 = x * m3 + (m2 - m3);
                Ok(T::from_real(m3 * m3 / (m2 * m2)) / f3)
            }
            ClosedClass::General => match self.mode {
                PsiMode::NonCritical => {
                    let (qt, rt) = (T::from_real(q), T::from_real(r));
                    let a = tail_gf(&self.law, &[qt, qt, rt, x])?;
                    let b = tail_gf(&self.law, &[qt, rt, rt, x])?;
                    let den = tail_gf(&self.law, &[qt, rt, x])?;
                    Ok((a - b * gamma) / den)
                }
                PsiMode::Critical => {
                    let one = T::from_real(1.0);
                    let f3 = tail_gf(&self.law, &[one, one, x])?;
                    let f4 = tail_gf(&self.law, &[one, one, one, x])?;
                    let f5 = tail_gf(&self.law, &[one, one, one, one, x])?;
                    let m2sq = self.m2 * self.m2;
                    Ok(f4 * f4 / (f3 * m2sq) - f5 / m2sq)
                }
            },
        }
    }

    /// `psi(q) = gamma/(r-q) - f''(q)/(2 alpha)`.
    pub fn endpoint_q(&self) -> Result<f64> {
        self.require_noncritical()?;
        let p = &self.prof;
        Ok(p.gamma / (p.r - p.q) - self.law.derivative(p.q, 2)? / (2.0 * p.alpha))
    }

    /// `psi(r) = 1/(r-q) - gamma f''(r)/(2 beta)`.
    pub fn endpoint_r(&self) -> Result<f64> {
        self.require_noncritical()?;
        let p = &self.prof;
        Ok(1.0 / (p.r - p.q) - p.gamma * self.law.derivative(p.r, 2)? / (2.0 * p.beta))
    }

    fn require_noncritical(&self) -> Result<()> {
        match self.mode {
            PsiMode::NonCritical => Ok(()),
            PsiMode::Critical => Err(Error::Regime("needs the non-critical kernel".into())),
        }
    }

    /// `int_a^b psi(x) dx`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        self.check_domain(a)?;
        self.check_domain(b)?;
        if a == b {
            return Ok(0.0);
        }
        let gamma = self.prof.gamma;
        match self.class {
            ClosedClass::Zero => Ok(0.0),
            ClosedClass::Cubic { p3, phi0 } => {
                Ok((1.0 - gamma) * ((p3 * b + phi0) / (p3 * a + phi0)).ln())
            }
            ClosedClass::CubicCritical => {
                let (m2, m3) = (self.m2, self.m3);
                let f3 = |x: f64| m2 - m3 * (1.0 - x);
                Ok(m3 / (m2 * m2) * (f3(b) / f3(a)).ln())
            }
            ClosedClass::General => self.integral_by_quadrature(a, b),
        }
    }

    /// Quadrature route, also used to cross-check the closed forms.
    pub fn integral_by_quadrature(&self, a: f64, b: f64) -> Result<f64> {
        let opts = QuadOptions::default();
        let top = self.upper();
        if a == top || b == top {
            // The kernel may blow up at r; x = r - u^2 removes the endpoint.
            let (lo, sign) = if b == top { (a, 1.0) } else { (b, -1.0) };
            let g = |u: f64| Ok(2.0 * u * self.psi_at(top - u * u)?);
            return Ok(sign * integrate(g, 0.0, (top - lo).sqrt(), opts)?.value);
        }
        Ok(integrate(|x| self.psi_at(x), a, b, opts)?.value)
    }

    /// `int` of the kernel along the segment from the real point `a` to `z`.
    pub fn integral_segment(&self, a: f64, z: Complex64) -> Result<Complex64> {
        if self.class == ClosedClass::Zero {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if z.im == 0.0 {
            return self.integral(a, z.re).map(|v| Complex64::new(v, 0.0));
        }
        let dz = z - a;
        let opts = QuadOptions::default();
        let res = integrate(|t| Ok(self.psi_at(dz * t + a)? * dz), 0.0, 1.0, opts)?;
        Ok(res.value)
    }

    pub fn integrable_to_r(&self) -> Integrability {
        self.integrability
    }

    /// `L(x) = exp(int_0^{r-x} psi)`.
    pub fn slowly_varying_l(&self, x: f64) -> Result<f64> {
        let top = self.upper();
        if !(x > 0.0 && x < top) {
            return Err(Error::Domain {
                value: x,
                lo: 0.0,
                hi: top,
            });
        }
        Ok(self.integral(0.0, top - x)?.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn general(law: &OffspringLaw) -> PsiKernel {
        let mut k = PsiKernel::new(law).unwrap();
        k.class = ClosedClass::General;
        k
    }

    #[test]
    fn mlf_kernel_vanishes_through_tail_gfs() {
        let law = OffspringLaw::mlf_from_shape(0.5, 2.0, 0.6, 0.5).unwrap();
        let k = general(&law);
        for x in [0.0, 0.3, 0.5, 1.0, 1.7, 2.0] {
            assert!(
                k.psi(x).unwrap().abs() < 1e-10,
                "x = {x}: {}",
                k.psi(x).unwrap()
            );
        }
        assert_eq!(
            PsiKernel::new(&law).unwrap().integral(0.1, 1.9).unwrap(),
            0.0
        );
    }

    #[test]
    fn trifurcation_closed_form_matches_general_route() {
        let law = OffspringLaw::trifurcation(0.3, 0.3, 0.2).unwrap();
        let closed = PsiKernel::new(&law).unwrap();
        let gen = general(&law);
        let p = closed.profile();
        let w = (1.0 + 0.2 * p.q * p.r) / (p.q + p.r);
        for x in [0.0, 0.4, p.q, 1.2, p.r] {
            let expected = (p.r - p.q) * 0.04 / ((0.2 * p.r + w) * (0.2 * x + w));
            assert!((closed.psi(x).unwrap() - expected).abs() < 1e-13);
            assert!((gen.psi(x).unwrap() - expected).abs() < 1e-10);
        }
        let (a, b) = (0.1, 0.9 * p.r);
        let qd = gen.integral(a, b).unwrap();
        assert!((closed.integral(a, b).unwrap() - qd).abs() < 1e-10);
    }

    #[test]
    fn critical_trifurcation() {
        let p3 = 0.2;
        let law = OffspringLaw::trifurcation((1.0 + p3) / 2.0, (1.0 - 3.0 * p3) / 2.0, p3).unwrap();
        let k = PsiKernel::new(&law).unwrap();
        assert_eq!(k.mode(), PsiMode::Critical);
        let (s1, s2) = (0.1, 0.8);
        let expected = 4.0 * p3 / (1.0 + 3.0 * p3).powi(2)
            * ((1.0 + p3 + 2.0 * p3 * s2) / (1.0 + p3 + 2.0 * p3 * s1)).ln();
        assert!((k.integral(s1, s2).unwrap() - expected).abs() < 1e-14);
        assert!((general(&law).integral(s1, s2).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn endpoint_values() {
        let law = OffspringLaw::finite(vec![0.4, 0.0, 0.4], 0.2).unwrap();
        let k = PsiKernel::new(&law).unwrap();
        assert!(k.endpoint_q().unwrap().abs() < 1e-14);
        let law = OffspringLaw::finite(vec![0.3, 0.1, 0.2, 0.25, 0.05], 0.1).unwrap();
        let k = PsiKernel::new(&law).unwrap();
        let p = *k.profile();
        assert!((k.psi(p.q).unwrap() - k.endpoint_q().unwrap()).abs() < 1e-12);
        assert!((k.psi(p.r).unwrap() - k.endpoint_r().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn integrability_verdicts() {
        let fin = OffspringLaw::finite(vec![0.4, 0.0, 0.4], 0.2).unwrap();
        assert_eq!(
            PsiKernel::new(&fin).unwrap().integrable_to_r(),
            Integrability::Integrable
        );
        let pf = OffspringLaw::power_fractional(0.5, 2.0, 0.5, 0.5).unwrap();
        assert_eq!(
            PsiKernel::new(&pf).unwrap().integrable_to_r(),
            Integrability::Integrable
        );
    }

    #[test]
    fn power_fractional_integral_reaches_r() {
        let pf = OffspringLaw::power_fractional(0.5, 2.0, 0.5, 0.5).unwrap();
        let k = PsiKernel::new(&pf).unwrap();
        let full = k.integral(0.0, 2.0).unwrap();
        let near = k.integral(0.0, 2.0 - 1e-8).unwrap();
        assert!(full.is_finite() && (full - near).abs() < 1e-3);
        assert!((k.slowly_varying_l(1e-8).unwrap() - full.exp()).abs() < 1e-3);
    }
}
