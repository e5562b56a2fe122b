//! The transition generating function `F_t(s) = E s^{Z_t}` (with `s^Delta = 0`).

use serde::{Deserialize, Serialize};

use crate::divdiff::{tail_gf, Analytic};
use crate::error::{Error, Result};
use crate::law::{LawKind, OffspringLaw};
use crate::numeric::ode::{dopri5, OdeOptions};
use crate::numeric::root::brent;
use crate::numeric::{Point, Series};
use crate::profile::{fixed_points, profile, ExtendableProfile};
use crate::psi::{PsiKernel, PsiMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ode,
    Implicit,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    pub value: f64,
    pub method: Method,
    pub err_estimate: f64,
}

impl TransitionResult {
    fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            method,
            err_estimate: 0.0,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            value: t,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(())
}

/// Default relative tolerance of [`f_ode`].
pub const ODE_RTOL: f64 = 1e-12;

fn ode_options() -> OdeOptions {
    ode_options_with(ODE_RTOL)
}

fn ode_options_with(rtol: f64) -> OdeOptions {
    OdeOptions {
        rtol,
        atol: rtol * 1e-2,
        max_steps: 2_000_000,
    }
}

/// Backward equation `dx/dt = f(x) - x`, `x_0 = s`.
///
/// With fixed points `q < r` the state is `y = ln|x - q|` and
/// `y' = -(r - x) phi(x)`; at criticality it is `y = ln(1 - x)` and
/// `y' = -(1 - x) f[1, 1, x]`. Both keep full relative accuracy next to the
/// fixed points.
pub fn f_ode(law: &OffspringLaw, t: f64, s: f64) -> Result<TransitionResult> {
    f_ode_with_tol(law, t, s, ODE_RTOL)
}

/// [`f_ode`] with the relative tolerance `rtol`.
pub fn f_ode_with_tol(law: &OffspringLaw, t: f64, s: f64, rtol: f64) -> Result<TransitionResult> {
    check_time(t)?;
    if !(rtol > 0.0 && rtol < 1.0) {
        return Err(Error::Domain {
            value: rtol,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let points = match fixed_points(law) {
        Ok(p) => Some(p),
        Err(Error::NotExtendable(_)) => None,
        Err(e) => return Err(e),
    };
    let upper = points.map_or(law.radius(), |(_, r)| r);
    if !(0.0..=upper).contains(&s) || (points.is_none() && s >= upper) {
        return Err(Error::Domain {
            value: s,
            lo: 0.0,
            hi: upper,
        });
    }
    if t == 0.0 {
        return Ok(TransitionResult::exact(s, Method::Ode));
    }
    let opts = ode_options_with(rtol);
    match points {
        Some((q, r)) if q == r => {
            if s == 1.0 {
                return Ok(TransitionResult::exact(1.0, Method::Ode));
            }
            let rhs = |y: &f64| -> Result<f64> {
                let x = 1.0 - y.exp();
                Ok(-(1.0 - x) * tail_gf(law, &[1.0, 1.0, x])?)
            };
            let sol = dopri5(rhs, (1.0 - s).ln(), t, opts)?;
            let gap = sol.y.exp();
            Ok(TransitionResult {
                value: 1.0 - gap,
                method: Method::Ode,
                err_estimate: gap * sol.err_estimate.max(opts.rtol),
            })
        }
        Some((q, r)) => {
            if s == q || s == r {
                return Ok(TransitionResult::exact(s, Method::Ode));
            }
            let side = if s > q { 1.0 } else { -1.0 };
            let rhs = |y: &f64| -> Result<f64> {
                let x = q + side * y.exp();
                Ok(-(r - x) * tail_gf(law, &[q, r, x])?)
            };
            let sol = dopri5(rhs, (side * (s - q)).ln(), t, opts)?;
            let gap = sol.y.exp();
            Ok(TransitionResult {
                value: q + side * gap,
                method: Method::Ode,
                err_estimate: gap * sol.err_estimate.max(opts.rtol),
            })
        }
        None => {
            let sol = dopri5(|x: &f64| Ok(law.eval(*x) - x), s, t, opts)?;
            Ok(TransitionResult {
                value: sol.y,
                method: Method::Ode,
                err_estimate: sol.err_estimate.max(opts.rtol * sol.y.abs()),
            })
        }
    }
}

/// Solve the tail-function equation for `F_t(s)`.
pub fn f_implicit(kernel: &PsiKernel, t: f64, s: f64) -> Result<TransitionResult> {
    check_time(t)?;
    let prof = *kernel.profile();
    if !(0.0..=prof.r).contains(&s) {
        return Err(Error::Domain {
            value: s,
            lo: 0.0,
            hi: prof.r,
        });
    }
    if t == 0.0 || s == prof.q || s == prof.r {
        return Ok(TransitionResult::exact(s, Method::Implicit));
    }
    match kernel.mode() {
        PsiMode::NonCritical => implicit_noncritical(kernel, &prof, t, s),
        PsiMode::Critical => implicit_critical(kernel, t, s),
    }
}

/// Solves `H(y) = 0` for `y = ln((F - q)/(s - q))`, where
/// `H(y) = y + alpha t - gamma ln((r - F)/(r - s)) - int_s^F psi`.
fn implicit_noncritical(
    kernel: &PsiKernel,
    prof: &ExtendableProfile,
    t: f64,
    s: f64,
) -> Result<TransitionResult> {
    let (q, r, alpha, gamma) = (prof.q, prof.r, prof.alpha, prof.gamma);
    let d = s - q;
    let h = |y: f64| -> Result<f64> {
        let f = q + d * y.exp();
        // (r - F)/(r - s) = 1 + (s - q)(1 - e^y)/(r - s)
        let log_ratio = (d * -y.exp_m1() / (r - s)).ln_1p();
        Ok(y + alpha * t - gamma * log_ratio - kernel.integral(s, f.clamp(0.0, r))?)
    };
    let mut lo = -alpha * t - 1.0;
    let mut tries = 0;
    while h(lo)? >= 0.0 {
        lo *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::Bracket(format!("no lower bracket for F_{t}({s})")));
        }
    }
    let y = brent(h, lo, 0.0, 1e-15)?;
    let gap = d.abs() * y.exp();
    Ok(TransitionResult {
        value: q + d * y.exp(),
        method: Method::Implicit,
        err_estimate: gap * 1e-13 + 1e-11 * gap / (1.0 + gap),
    })
}

/// Solves `G(w) = 0` for `w = ln((1 - s)/(1 - F))`, where
/// `G(w) = (e^w - 1)/(m2 (1 - s)) + (m3/m2^2) w + int_s^F psi_{1,1} - t`.
fn implicit_critical(kernel: &PsiKernel, t: f64, s: f64) -> Result<TransitionResult> {
    let (m2, m3) = kernel.m2_m3();
    let u = 1.0 - s;
    let g = |w: f64| -> Result<f64> {
        let f = 1.0 - u * (-w).exp();
        Ok(w.exp_m1() / (m2 * u) + m3 / (m2 * m2) * w + kernel.integral(s, f.min(1.0))? - t)
    };
    let mut hi = (m2 * t * u).ln_1p() + 1.0;
    let mut tries = 0;
    while g(hi)? <= 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::Bracket(format!("no upper bracket for F_{t}({s})")));
        }
    }
    let w = brent(g, 0.0, hi, 1e-15)?;
    let gap = u * (-w).exp();
    Ok(TransitionResult {
        value: 1.0 - gap,
        method: Method::Implicit,
        err_estimate: gap * 1e-13 + 1e-11 * gap / (1.0 + gap),
    })
}

/// Closed forms for quadratic laws, Harris-Yule laws and the linear-fractional
/// law with `gamma = 1/2`. `None` for other laws.
pub fn f_closed(law: &OffspringLaw, t: f64, s: f64) -> Result<Option<TransitionResult>> {
    check_time(t)?;
    let closed = |v: f64| {
        Ok(Some(TransitionResult {
            value: v,
            method: Method::Closed,
            err_estimate: 8.0 * f64::EPSILON * v.abs().max(1.0),
        }))
    };
    if let LawKind::HarrisYule { k } = law.kind() {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain {
                value: s,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if s == 0.0 {
            return closed(0.0);
        }
        let k = *k as f64;
        let ekt = (k * t).exp();
        return closed((ekt * s.powf(-k) - ekt + 1.0).powf(-1.0 / k));
    }
    let quadratic = law.degree() == Some(2);
    let half_mlf = matches!(law.kind(), LawKind::ModifiedLinearFractional { .. }) && !quadratic;
    if !quadratic && !half_mlf {
        return Ok(None);
    }
    let prof = profile(law)?;
    if !(0.0..=prof.r).contains(&s) {
        return Err(Error::Domain {
            value: s,
            lo: 0.0,
            hi: prof.r,
        });
    }
    if prof.is_critical() {
        if !quadratic {
            return Ok(None);
        }
        let m2 = law.moments().1;
        return closed(1.0 - (1.0 - s) / (1.0 + m2 * t * (1.0 - s)));
    }
    let (q, r) = (prof.q, prof.r);
    let e = (-prof.alpha * t).exp();
    if quadratic {
        return closed(((r - s) * q + (s - q) * r * e) / (r - s + (s - q) * e));
    }
    if (prof.gamma - 0.5).abs() > 1e-12 {
        return Ok(None);
    }
    if s == q || s == r {
        return closed(s);
    }
    // u = F - q solves u^2 + c u - c (r - q) = 0.
    let c = e * e * (s - q) * (s - q) / (r - s);
    let disc = (c * c + 4.0 * c * (r - q)).sqrt();
    let u = if s > q {
        2.0 * c * (r - q) / (c + disc)
    } else {
        -(c + disc) / 2.0
    };
    closed(q + u)
}

/// `F_t` viewed as an analytic function on `[0, r]`, for its tail generating
/// functions.
pub struct FtAnalytic<'a> {
    law: &'a OffspringLaw,
    t: f64,
    r: f64,
    beta: f64,
}

impl<'a> FtAnalytic<'a> {
    pub fn new(law: &'a OffspringLaw, t: f64) -> Result<Self> {
        check_time(t)?;
        let prof = profile(law)?;
        Ok(Self {
            law,
            t,
            r: prof.r,
            beta: prof.beta,
        })
    }
}

impl Analytic for FtAnalytic<'_> {
    fn value<T: Point>(&self, z: T) -> Result<T> {
        if z.im() != 0.0 {
            return Err(Error::Spec("F_t is only evaluated at real points".into()));
        }
        Ok(T::from_real(f_ode(self.law, self.t, z.re())?.value))
    }

    fn jet(&self, c: f64, len: usize) -> Result<Series> {
        let law = self.law;
        let rhs = |x: &Series| Ok(law.eval(x.clone()) - x.clone());
        Ok(dopri5(rhs, Series::variable(c, len), self.t, ode_options())?.y)
    }

    fn radius(&self) -> f64 {
        self.r
    }

    fn boundary_taylor(&self, m: usize) -> f64 {
        if self.law.radius() > self.r {
            return self
                .jet(self.r, m + 1)
                .map_or(f64::INFINITY, |j| j.coeff(m));
        }
        match m {
            0 => self.r,
            1 => (self.beta * self.t).exp(),
            _ => f64::INFINITY,
        }
    }
}

/// `F_t^{(n)}(s_1..s_n)`.
pub fn tail_gf_of_f(law: &OffspringLaw, t: f64, args: &[f64]) -> Result<f64> {
    tail_gf(&FtAnalytic::new(law, t)?, args)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Absorption {
    pub p_extinct: f64,
    pub p_killed: f64,
    pub p_alive: f64,
}

pub fn absorption(law: &OffspringLaw, t: f64) -> Result<Absorption> {
    let f0 = f_ode(law, t, 0.0)?.value;
    let f1 = if law.defect() == 0.0 {
        1.0
    } else {
        f_ode(law, t, 1.0)?.value
    };
    Ok(Absorption {
        p_extinct: f0,
        p_killed: 1.0 - f1,
        p_alive: f1 - f0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary() -> OffspringLaw {
        OffspringLaw::finite(vec![0.4, 0.0, 0.4], 0.2).unwrap()
    }

    #[test]
    fn ode_examples() {
        let crit = OffspringLaw::finite(vec![0.5, 0.0, 0.5], 0.0).unwrap();
        assert!((f_ode(&crit, 2.0, 0.0).unwrap().value - 0.5).abs() < 1e-12);
        let t = 2f64.ln() / 0.6;
        assert!((f_ode(&binary(), t, 0.0).unwrap().value - 2.0 / 7.0).abs() < 1e-12);
        assert_eq!(f_ode(&binary(), 0.0, 0.3).unwrap().value, 0.3);
    }

    #[test]
    fn implicit_examples() {
        let hy = OffspringLaw::harris_yule(1).unwrap();
        let k = PsiKernel::new(&hy).unwrap();
        let v = f_implicit(&k, 2f64.ln(), 0.5).unwrap().value;
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let kb = PsiKernel::new(&binary()).unwrap();
        assert_eq!(f_implicit(&kb, 3.0, 0.5).unwrap().value, 0.5);
        assert_eq!(f_implicit(&kb, 3.0, 2.0).unwrap().value, 2.0);
    }

    #[test]
    fn closed_forms() {
        let crit = OffspringLaw::finite(vec![0.5, 0.0, 0.5], 0.0).unwrap();
        assert!((f_closed(&crit, 2.0, 0.0).unwrap().unwrap().value - 0.5).abs() < 1e-15);
        let hy2 = OffspringLaw::harris_yule(2).unwrap();
        let (t, s) = (0.7f64, 0.6f64);
        let expected = ((2.0 * t).exp() / (s * s) - (2.0 * t).exp() + 1.0).powf(-0.5);
        assert!((f_closed(&hy2, t, s).unwrap().unwrap().value - expected).abs() < 1e-15);
        let pf = OffspringLaw::power_fractional(0.5, 2.0, 0.5, 0.5).unwrap();
        assert!(f_closed(&pf, 1.0, 0.3).unwrap().is_none());
    }

    #[test]
    fn half_gamma_mlf_closed_form_agrees_with_ode() {
        let law = OffspringLaw::mlf_from_shape(0.5, 2.0, 0.6, 0.5).unwrap();
        for s in [0.0, 0.3, 0.9, 1.5] {
            let c = f_closed(&law, 1.3, s).unwrap().unwrap().value;
            let o = f_ode(&law, 1.3, s).unwrap().value;
            assert!((c - o).abs() < 1e-11, "s = {s}: {c} vs {o}");
        }
    }

    #[test]
    fn tail_gf_of_f_identities() {
        let law = OffspringLaw::trifurcation(0.3, 0.3, 0.2).unwrap();
        let p = profile(&law).unwrap();
        let t = 1.5;
        let qr = tail_gf_of_f(&law, t, &[p.q, p.r]).unwrap();
        assert!((qr - 1.0).abs() < 1e-10);
        let qq = tail_gf_of_f(&law, t, &[p.q, p.q]).unwrap();
        assert!((qq - (-p.alpha * t).exp()).abs() < 1e-10);
        let id = tail_gf_of_f(&law, 0.0, &[0.2, 0.7]).unwrap();
        assert!((id - 1.0).abs() < 1e-14);
    }

    #[test]
    fn absorption_limits() {
        let a = absorption(&binary(), 0.0).unwrap();
        assert_eq!((a.p_extinct, a.p_killed, a.p_alive), (0.0, 0.0, 1.0));
        let a = absorption(&binary(), 60.0).unwrap();
        assert!((a.p_extinct - 0.5).abs() < 1e-12 && (a.p_killed - 0.5).abs() < 1e-12);
        let sup = OffspringLaw::finite(vec![0.2, 0.0, 0.8], 0.0).unwrap();
        assert_eq!(absorption(&sup, 3.0).unwrap().p_killed, 0.0);
    }
}
