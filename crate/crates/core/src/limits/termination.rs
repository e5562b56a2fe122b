//! Termination time `T_1` (hitting time of the graveyard) for families
//! `f_eps -> f` whose defect `1 - f_eps(1) = eps` vanishes.
//!
//! `V_eps(t) = P(T_1 <= t | T_1 < inf) = (1 - F_{t,eps}(1)) / (1 - q_eps)`.

use serde::{Deserialize, Serialize};

use crate::divdiff::tail_gf;
use crate::error::{Error, Result};
use crate::law::OffspringLaw;
use crate::numeric::root::brent;
use crate::profile::{profile, ExtendableProfile, CRITICAL_F1_TOL, CRITICAL_M1_TOL};
use crate::psi::PsiKernel;
use crate::transition::tail_gf_of_f;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NearRegime {
    /// Limit mean `m1 < 1`.
    NearlySubcritical,
    NearlyCritical,
    /// `m1 > 1`.
    NearlySupercritical,
}

/// How `f_eps` is built from the limit law.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builder {
    /// `f_eps = (1 - eps) f`.
    #[default]
    Scaled,
}

/// JSON form of a family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    pub limit: OffspringLaw,
    #[serde(default)]
    pub builder: Builder,
}

#[derive(Clone, Debug)]
pub struct NearCriticalFamily {
    limit: OffspringLaw,
    builder: Builder,
    regime: NearRegime,
    /// Limit of `(1 - q_eps)/(r_eps - 1)`.
    d: f64,
    moments: (f64, f64, f64),
}

impl NearCriticalFamily {
    pub fn new(limit: OffspringLaw, builder: Builder) -> Result<Self> {
        if (limit.eval(1.0) - 1.0).abs() > CRITICAL_F1_TOL {
            return Err(Error::Constraint(
                "the limit law must be non-defective".into(),
            ));
        }
        let moments = limit.moments();
        let m1 = moments.0;
        if !m1.is_finite() {
            return Err(Error::Constraint(
                "the limit law needs a finite mean".into(),
            ));
        }
        let regime = if (m1 - 1.0).abs() <= CRITICAL_M1_TOL {
            NearRegime::NearlyCritical
        } else if m1 < 1.0 {
            NearRegime::NearlySubcritical
        } else {
            NearRegime::NearlySupercritical
        };
        // Scaling moves f(x) - x down by eps f(x), which is symmetric around 1
        // to first order.
        let d = match (builder, regime) {
            (Builder::Scaled, NearRegime::NearlyCritical) => 1.0,
            (_, NearRegime::NearlySubcritical) => 0.0,
            (_, NearRegime::NearlySupercritical) => f64::INFINITY,
        };
        limit.scaled(0.5)?;
        Ok(Self {
            limit,
            builder,
            regime,
            d,
            moments,
        })
    }

    pub fn scaled(limit: OffspringLaw) -> Result<Self> {
        Self::new(limit, Builder::Scaled)
    }

    pub fn from_spec(spec: FamilySpec) -> Result<Self> {
        Self::new(spec.limit, spec.builder)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: FamilySpec =
            serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
        Self::from_spec(spec)
    }

    pub fn to_spec(&self) -> FamilySpec {
        FamilySpec {
            limit: self.limit.clone(),
            builder: self.builder,
        }
    }

    pub fn law(&self, eps: f64) -> Result<OffspringLaw> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain {
                value: eps,
                lo: 0.0,
                hi: 1.0,
            });
        }
        match self.builder {
            Builder::Scaled => self.limit.scaled(eps),
        }
    }

    pub fn limit(&self) -> &OffspringLaw {
        &self.limit
    }

    pub fn regime(&self) -> NearRegime {
        self.regime
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// `(m1, m2, m3)` of the limit law.
    pub fn moments(&self) -> (f64, f64, f64) {
        self.moments
    }
}

/// Exact profile of `f_eps` next to the first-order predictions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearCriticalParams {
    pub eps: f64,
    pub q: f64,
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `(1 - q)/(r - 1)`.
    pub d_eps: f64,
    pub predicted_one_minus_q: f64,
    pub predicted_r_minus_one: f64,
    pub rel_dev_q: f64,
    pub rel_dev_r: f64,
}

pub fn near_critical_params(family: &NearCriticalFamily, eps: f64) -> Result<NearCriticalParams> {
    let law = family.law(eps)?;
    let p = profile(&law)?;
    let (m1, m2, _) = family.moments();
    let (pq, pr) = match family.regime() {
        NearRegime::NearlySubcritical => {
            let lim = profile(family.limit())?;
            (eps / (1.0 - m1), lim.r - 1.0)
        }
        NearRegime::NearlySupercritical => {
            let lim = profile(family.limit())?;
            (1.0 - lim.q, eps / (m1 - 1.0))
        }
        NearRegime::NearlyCritical => {
            let d = family.d();
            ((d * eps / m2).sqrt(), (eps / (m2 * d)).sqrt())
        }
    };
    let (oq, or) = (1.0 - p.q, p.r - 1.0);
    Ok(NearCriticalParams {
        eps,
        q: p.q,
        r: p.r,
        alpha: p.alpha,
        beta: p.beta,
        gamma: p.gamma,
        d_eps: oq / or,
        predicted_one_minus_q: pq,
        predicted_r_minus_one: pr,
        rel_dev_q: (oq - pq).abs() / oq,
        rel_dev_r: (or - pr).abs() / or,
    })
}

/// Shape of the limit distribution of the rescaled termination time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum LimitShape {
    /// `1 - e^{-rate u}`.
    Exponential { rate: f64 },
    /// `Phi(u)` solving `u = ln Phi + int_{1-(1-q)Phi}^1 psi`.
    Implicit { q: f64, gamma: f64 },
    /// `(e^u - 1)/(e^u + d)`.
    Balanced { d: f64 },
    /// `1/(1 + e^{-u})`.
    Logistic,
}

/// `P(T_1 <= offset + u * unit | T_1 < inf) -> cdf(u)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TerminationLimit {
    pub eps: f64,
    pub shape: LimitShape,
    pub offset: f64,
    pub unit: f64,
    #[serde(skip)]
    kernel: Option<PsiKernel>,
}

pub fn termination_limit(family: &NearCriticalFamily, eps: f64) -> Result<TerminationLimit> {
    let (m1, m2, _) = family.moments();
    let build = |shape, offset, unit, kernel| {
        Ok(TerminationLimit {
            eps,
            shape,
            offset,
            unit,
            kernel,
        })
    };
    match family.regime() {
        NearRegime::NearlySubcritical => {
            build(LimitShape::Exponential { rate: 1.0 - m1 }, 0.0, 1.0, None)
        }
        NearRegime::NearlySupercritical => {
            let kernel = PsiKernel::new(family.limit())?;
            let lim = *kernel.profile();
            let p = near_critical_params(family, eps)?;
            let offset = ((1.0 / (p.r - 1.0)).ln() + (1.0 - p.q).ln()) / p.beta;
            let shape = LimitShape::Implicit {
                q: lim.q,
                gamma: lim.gamma,
            };
            build(shape, offset, 1.0 / p.beta, Some(kernel))
        }
        NearRegime::NearlyCritical => {
            let d = family.d();
            let p = near_critical_params(family, eps)?;
            if d == 0.0 {
                let unit = 1.0 / ((p.r - 1.0) * m2);
                build(LimitShape::Exponential { rate: 1.0 }, 0.0, unit, None)
            } else if d.is_infinite() {
                build(
                    LimitShape::Logistic,
                    p.d_eps.ln() / p.beta,
                    1.0 / p.alpha,
                    None,
                )
            } else {
                let a = balance_constant(m2, d);
                build(
                    LimitShape::Balanced { d },
                    0.0,
                    1.0 / (a * eps.sqrt()),
                    None,
                )
            }
        }
    }
}

/// `a = sqrt(m2) (sqrt(d) + 1/sqrt(d))`, so that `alpha_eps ~ a sqrt(eps)`.
pub fn balance_constant(m2: f64, d: f64) -> f64 {
    (m2 * (d + 2.0 + 1.0 / d)).sqrt()
}

impl TerminationLimit {
    /// Real time for the limit variable `u`.
    pub fn time(&self, u: f64) -> f64 {
        self.offset + u * self.unit
    }

    /// Limit variable for the real time `t`.
    pub fn scaled(&self, t: f64) -> f64 {
        (t - self.offset) / self.unit
    }

    pub fn cdf(&self, u: f64) -> Result<f64> {
        match self.shape {
            LimitShape::Exponential { rate } => {
                Ok(if u <= 0.0 { 0.0 } else { -(-rate * u).exp_m1() })
            }
            LimitShape::Balanced { d } => Ok(if u <= 0.0 {
                0.0
            } else {
                u.exp_m1() / (u.exp() + d)
            }),
            LimitShape::Logistic => Ok(1.0 / (1.0 + (-u).exp())),
            LimitShape::Implicit { .. } => self.solve_phi(u),
        }
    }

    fn kernel(&self) -> Result<&PsiKernel> {
        self.kernel
            .as_ref()
            .ok_or_else(|| Error::Regime("only the nearly supercritical limit has a kernel".into()))
    }

    /// `Phi(u)` from `u = ln Phi - ln(1 - Phi)/gamma - (1/gamma) int_{1-(1-q)Phi}^1 psi_{q,1}`,
    /// which is the defining equation with `psi` split as in [`Self::psi`].
    fn solve_phi(&self, u: f64) -> Result<f64> {
        let kernel = self.kernel()?;
        let LimitShape::Implicit { q, gamma } = self.shape else {
            unreachable!()
        };
        if u == f64::INFINITY {
            return Ok(1.0);
        }
        if u == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        // Solved in v = ln Phi - ln(1 - Phi) for resolution at both ends.
        let g = |v: f64| -> Result<f64> {
            let phi = 1.0 / (1.0 + (-v).exp());
            let ln_phi = -(-v).exp().ln_1p();
            let ln_1m = -v.exp().ln_1p();
            let int = kernel.integral(1.0 - (1.0 - q) * phi, 1.0)?;
            Ok(ln_phi - ln_1m / gamma - int / gamma - u)
        };
        let span = 40.0 + u.abs() * (1.0 + 1.0 / gamma);
        let v = brent(g, -span, span, 1e-14)?;
        Ok(1.0 / (1.0 + (-v).exp()))
    }

    /// The integrand of the defining equation,
    /// `psi(x) = phi[1, x]/phi(x) + (m1 - 1)/((1 - q)(x - q) phi(x))` with
    /// `phi(x) = f[q, 1, x]` of the limit law. It equals
    /// `1/(gamma (x - q)) - psi_{q,1}(x)/gamma`.
    pub fn psi(&self, x: f64) -> Result<f64> {
        let kernel = self.kernel()?;
        let law = kernel.law();
        let q = kernel.profile().q;
        if !(x > q && x <= 1.0) {
            return Err(Error::Domain {
                value: x,
                lo: q,
                hi: 1.0,
            });
        }
        let m1 = law.moments().0;
        let phi = tail_gf(law, &[q, 1.0, x])?;
        let phi_1x = tail_gf(law, &[q, 1.0, 1.0, x])?;
        Ok(phi_1x / phi + (m1 - 1.0) / ((1.0 - q) * (x - q) * phi))
    }
}

/// Deviations between the nearly critical equation and its critical limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub eps: f64,
    /// `max_x |psi_eps(x)/alpha_eps - psi_{1,1}(x)|`.
    pub psi_deviation: f64,
    /// `e{(r - q) F[q, r, s] / F[q, s]}` with `e{x} = ln(1 + x)/x`.
    pub e_value: f64,
    /// `ln F[r, s]/beta - ln F[q, s]/alpha` for `f_eps`.
    pub lhs: f64,
    /// `(1/m2) G[1, 1, s]/G[1, s] - (m3/m2^2) ln G[1, s]` for the limit law.
    pub rhs: f64,
}

pub fn near_critical_consistency(
    family: &NearCriticalFamily,
    eps: f64,
    xs: &[f64],
    t: f64,
    s: f64,
) -> Result<ConsistencyReport> {
    if family.regime() != NearRegime::NearlyCritical {
        return Err(Error::Regime(
            "consistency check needs a critical limit".into(),
        ));
    }
    let limit_kernel = PsiKernel::new(family.limit())?;
    let (_, m2, m3) = family.moments();
    let law = family.law(eps)?;
    let kernel = PsiKernel::new(&law)?;
    let p: ExtendableProfile = *kernel.profile();
    let mut psi_deviation: f64 = 0.0;
    for &x in xs {
        let dev = (kernel.psi(x)? / p.alpha - limit_kernel.psi(x)?).abs();
        psi_deviation = psi_deviation.max(dev);
    }
    let fq = tail_gf_of_f(&law, t, &[p.q, s])?;
    let fr = tail_gf_of_f(&law, t, &[p.r, s])?;
    let fqr = tail_gf_of_f(&law, t, &[p.q, p.r, s])?;
    let x = (p.r - p.q) * fqr / fq;
    let e_value = if x == 0.0 { 1.0 } else { x.ln_1p() / x };
    let lhs = fr.ln() / p.beta - fq.ln() / p.alpha;
    let limit = family.limit();
    let g1 = tail_gf_of_f(limit, t, &[1.0, s])?;
    let g11 = tail_gf_of_f(limit, t, &[1.0, 1.0, s])?;
    let rhs = g11 / (m2 * g1) - m3 / (m2 * m2) * g1.ln();
    Ok(ConsistencyReport {
        eps,
        psi_deviation,
        e_value,
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transition::f_ode;

    fn v_eps(family: &NearCriticalFamily, eps: f64, t: f64) -> f64 {
        let law = family.law(eps).unwrap();
        let q = profile(&law).unwrap().q;
        (1.0 - f_ode(&law, t, 1.0).unwrap().value) / (1.0 - q)
    }

    fn balanced() -> NearCriticalFamily {
        NearCriticalFamily::scaled(OffspringLaw::finite(vec![0.5, 0.0, 0.5], 0.0).unwrap()).unwrap()
    }

    #[test]
    fn balanced_params() {
        let f = balanced();
        assert_eq!(f.regime(), NearRegime::NearlyCritical);
        let eps: f64 = 1e-4;
        let p = near_critical_params(&f, eps).unwrap();
        let root = (2.0 * eps - eps * eps).sqrt();
        assert!((1.0 - p.q - (root - eps) / (1.0 - eps)).abs() < 1e-13);
        assert!(p.rel_dev_q < 0.02 && (p.predicted_one_minus_q - (2.0 * eps).sqrt()).abs() < 1e-15);
        assert!((p.d_eps - 1.0).abs() < 0.02);
    }

    #[test]
    fn nearly_subcritical_lemma() {
        let f = NearCriticalFamily::scaled(OffspringLaw::finite(vec![0.6, 0.0, 0.4], 0.0).unwrap())
            .unwrap();
        assert_eq!(f.regime(), NearRegime::NearlySubcritical);
        let a = near_critical_params(&f, 1e-3).unwrap().rel_dev_q;
        let b = near_critical_params(&f, 1e-5).unwrap().rel_dev_q;
        assert!(b < a && b < 1e-3);
    }

    #[test]
    fn nearly_subcritical_limit_against_transition() {
        let f = NearCriticalFamily::scaled(OffspringLaw::finite(vec![0.6, 0.0, 0.4], 0.0).unwrap())
            .unwrap();
        let lim = termination_limit(&f, 1e-6).unwrap();
        for t in [0.5, 2.0, 8.0] {
            let v = v_eps(&f, 1e-6, lim.time(t));
            assert!((v - lim.cdf(t).unwrap()).abs() < 1e-4, "t = {t}");
        }
    }

    #[test]
    fn balanced_limit_against_transition() {
        let f = balanced();
        let eps = 1e-6;
        let lim = termination_limit(&f, eps).unwrap();
        assert!((lim.unit - 1.0 / (2.0 * eps).sqrt()).abs() < 1e-9);
        for u in [0.3, 1.0, 3.0] {
            let v = v_eps(&f, eps, lim.time(u));
            assert!((v - (u / 2.0).tanh()).abs() < 5e-3, "u = {u}: {v}");
        }
    }

    fn mlf_super_family() -> NearCriticalFamily {
        let limit = OffspringLaw::mlf_from_shape(0.3, 1.0, 0.6, 0.5).unwrap();
        NearCriticalFamily::scaled(limit).unwrap()
    }

    #[test]
    fn mlf_half_phi_closed_form() {
        let lim = termination_limit(&mlf_super_family(), 1e-6).unwrap();
        for u in [-2.0, -0.5, 0.0, 1.0, 4.0] {
            let phi = lim.cdf(u).unwrap();
            // e^{-u} Phi = (1 - Phi)^2
            let expected = 1.0 - (-u).exp() * ((u.exp() + 0.25f64).sqrt() - 0.5);
            assert!((phi - expected).abs() < 1e-12, "u = {u}");
            assert!(((-u).exp() * phi - (1.0 - phi).powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn nearly_supercritical_limit_against_transition() {
        let f = mlf_super_family();
        let eps = 1e-7;
        let lim = termination_limit(&f, eps).unwrap();
        for u in [-1.0, 0.5, 2.0] {
            let v = v_eps(&f, eps, lim.time(u));
            assert!((v - lim.cdf(u).unwrap()).abs() < 5e-3, "u = {u}: {v}");
        }
    }

    #[test]
    fn implicit_psi_split_and_positivity() {
        let limit = OffspringLaw::trifurcation(0.2, 0.5, 0.3).unwrap();
        let f = NearCriticalFamily::scaled(limit.clone()).unwrap();
        assert_eq!(f.regime(), NearRegime::NearlySupercritical);
        let lim = termination_limit(&f, 1e-5).unwrap();
        let k = PsiKernel::new(&limit).unwrap();
        let (q, gamma) = (k.profile().q, k.profile().gamma);
        for i in 1..=10 {
            let x = q + (1.0 - q) * i as f64 / 10.0;
            let direct = lim.psi(x).unwrap();
            let split = 1.0 / (gamma * (x - q)) - k.psi(x).unwrap() / gamma;
            assert!(direct > 0.0);
            assert!((direct - split).abs() < 1e-10 * direct.abs().max(1.0));
        }
        let v = v_eps(&f, 1e-7, termination_limit(&f, 1e-7).unwrap().time(0.5));
        assert!((v - lim.cdf(0.5).unwrap()).abs() < 5e-3);
    }

    #[test]
    fn consistency_shrinks() {
        let tri =
            NearCriticalFamily::scaled(OffspringLaw::trifurcation(0.6, 0.2, 0.2).unwrap()).unwrap();
        let xs = [0.0, 0.25, 0.5, 0.75, 0.95];
        let a = near_critical_consistency(&tri, 1e-2, &xs, 1.0, 0.5).unwrap();
        let b = near_critical_consistency(&tri, 1e-3, &xs, 1.0, 0.5).unwrap();
        assert!(b.psi_deviation < a.psi_deviation);
        assert!((b.lhs - b.rhs).abs() < (a.lhs - a.rhs).abs());
        let c = near_critical_consistency(&tri, 1e-4, &xs, 1.0, 0.5).unwrap();
        assert!((c.e_value - 1.0).abs() < 0.05);
        let mlf =
            NearCriticalFamily::scaled(OffspringLaw::mlf(0.5, 0.125, 0.0, 0.25).unwrap()).unwrap();
        assert_eq!(
            near_critical_consistency(&mlf, 1e-3, &xs, 1.0, 0.5)
                .unwrap()
                .psi_deviation,
            0.0
        );
    }

    #[test]
    fn family_json_round_trip() {
        let f = balanced();
        let text = serde_json::to_string(&f.to_spec()).unwrap();
        let g = NearCriticalFamily::from_json(&text).unwrap();
        assert_eq!(g.limit(), f.limit());
        assert!(NearCriticalFamily::from_json(
            r#"{"limit": {"type": "finite", "p": [0.5, 0.4], "defect": 0.1}}"#
        )
        .is_err());
    }
}
