//! Fixed points `q <= r` of `f(x) = x`, the rates at them and the regime.

use serde::{Deserialize, Serialize};

use crate::divdiff::tail_gf;
use crate::error::{Error, Result};
use crate::law::OffspringLaw;
use crate::numeric::root::bisect;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `q = r = 1`.
    Critical,
    /// `q = 1 < r`.
    SubcriticalExtendable,
    /// `q < 1 = r`.
    Supercritical,
    /// `q < 1 < r`.
    DefectiveExtendable,
}

/// Fixed points and rates. In the critical regime `alpha = beta = 0` and
/// `gamma` is set to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendableProfile {
    pub q: f64,
    pub r: f64,
    pub alpha: f64,
    /// `f'(r) - 1`, possibly `+inf`.
    pub beta: f64,
    /// `alpha / beta`; 0 when `beta` is infinite.
    pub gamma: f64,
    pub regime: Regime,
}

impl ExtendableProfile {
    pub fn is_critical(&self) -> bool {
        self.regime == Regime::Critical
    }

    pub fn beta_is_finite(&self) -> bool {
        self.beta.is_finite()
    }
}

pub(crate) const CRITICAL_F1_TOL: f64 = 1e-12;
pub(crate) const CRITICAL_M1_TOL: f64 = 1e-10;

fn is_critical(law: &OffspringLaw) -> bool {
    let f1 = law.eval(1.0);
    (f1 - 1.0).abs() <= CRITICAL_F1_TOL && (law.moments().0 - 1.0).abs() <= CRITICAL_M1_TOL
}

/// `(q, r)`; critical laws give `(1, 1)` exactly.
pub fn fixed_points(law: &OffspringLaw) -> Result<(f64, f64)> {
    if is_critical(law) {
        return Ok((1.0, 1.0));
    }
    let g = |x: f64| law.eval(x) - x;
    let non_defective = (law.eval(1.0) - 1.0).abs() <= CRITICAL_F1_TOL;
    let m1 = law.moments().0;

    let q = if g(0.0) == 0.0 {
        0.0
    } else if non_defective && m1 < 1.0 {
        1.0
    } else {
        let x0 = if g(1.0) < 0.0 && !non_defective {
            1.0
        } else {
            point_below(&g, 1.0, -1.0)?
        };
        bisect(g, 0.0, x0)?
    };

    let r = if non_defective && m1 > 1.0 {
        1.0
    } else {
        let (lo, hi) = bracket_second_root(law, non_defective)?;
        if hi.1 {
            hi.0
        } else {
            bisect(g, lo, hi.0)?
        }
    };
    Ok((q, r))
}

/// A point `x = base + dir * h` with `g(x) < 0`, halving `h` from 1/2.
fn point_below(g: &impl Fn(f64) -> f64, base: f64, dir: f64) -> Result<f64> {
    let mut h = 0.5;
    while h > 1e-15 {
        let x = base + dir * h;
        if g(x) < 0.0 {
            return Ok(x);
        }
        h *= 0.5;
    }
    Err(Error::Bracket(format!(
        "no point with f(x) < x next to {base}"
    )))
}

/// `(lo, (hi, hi_is_root))` bracketing the second fixed point above 1.
fn bracket_second_root(law: &OffspringLaw, non_defective: bool) -> Result<(f64, (f64, bool))> {
    let g = |x: f64| law.eval(x) - x;
    let radius = law.radius();
    let not_extendable = || {
        Error::NotExtendable(format!(
            "f(x) < x on (1, {radius}) with no second fixed point"
        ))
    };
    let hi = if radius.is_finite() {
        let at_r = law.boundary_taylor(0);
        if at_r.is_finite() {
            let v = at_r - radius;
            if v == 0.0 {
                (radius, true)
            } else if v > 0.0 {
                (radius, false)
            } else {
                return Err(not_extendable());
            }
        } else {
            // Pole at the radius: f blows up, so g turns positive before it.
            let mut found = None;
            for k in 1..60 {
                let x = radius - (radius - 1.0) * 0.5f64.powi(k);
                if g(x) > 0.0 {
                    found = Some(x);
                    break;
                }
            }
            (found.ok_or_else(not_extendable)?, false)
        }
    } else {
        let mut x = 2.0;
        while g(x) <= 0.0 {
            x *= 2.0;
            if x > 1e12 {
                return Err(not_extendable());
            }
        }
        (x, false)
    };
    let lo = if non_defective {
        // g(1) = 0 with g'(1) < 0: step right until g < 0.
        let span = hi.0 - 1.0;
        let mut h = 0.5 * span;
        loop {
            if g(1.0 + h) < 0.0 {
                break 1.0 + h;
            }
            h *= 0.5;
            if h < 1e-15 {
                return Err(not_extendable());
            }
        }
    } else {
        1.0
    };
    Ok((lo, hi))
}

pub fn profile(law: &OffspringLaw) -> Result<ExtendableProfile> {
    let (q, r) = fixed_points(law)?;
    if q == 1.0 && r == 1.0 {
        return Ok(ExtendableProfile {
            q,
            r,
            alpha: 0.0,
            beta: 0.0,
            gamma: 1.0,
            regime: Regime::Critical,
        });
    }
    let alpha = 1.0 - law.derivative(q, 1)?;
    let beta = law.derivative(r, 1)? - 1.0;
    let gamma = if beta.is_finite() { alpha / beta } else { 0.0 };
    let regime = match (q < 1.0, r > 1.0) {
        (true, true) => Regime::DefectiveExtendable,
        (true, false) => Regime::Supercritical,
        (false, true) => Regime::SubcriticalExtendable,
        (false, false) => Regime::Critical,
    };
    Ok(ExtendableProfile {
        q,
        r,
        alpha,
        beta,
        gamma,
        regime,
    })
}

/// `phi(s) = f^{(3)}(q, r, s) = (f(s) - s)/((q - s)(r - s))`.
pub fn phi(law: &OffspringLaw, prof: &ExtendableProfile, s: f64) -> Result<f64> {
    if prof.is_critical() {
        return Err(Error::Regime("phi needs q < r".into()));
    }
    if !(0.0..=prof.r).contains(&s) {
        return Err(Error::Domain {
            value: s,
            lo: 0.0,
            hi: prof.r,
        });
    }
    tail_gf(law, &[prof.q, prof.r, s])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_defective() {
        let law = OffspringLaw::finite(vec![0.4, 0.0, 0.4], 0.2).unwrap();
        let p = profile(&law).unwrap();
        assert!((p.q - 0.5).abs() < 1e-15 && (p.r - 2.0).abs() < 1e-14);
        assert!((p.alpha - 0.6).abs() < 1e-14 && (p.beta - 0.6).abs() < 1e-14);
        assert!((p.gamma - 1.0).abs() < 1e-13);
        assert_eq!(p.regime, Regime::DefectiveExtendable);
        for s in [0.0, 0.3, 1.0, 2.0] {
            assert!((phi(&law, &p, s).unwrap() - 0.4).abs() < 1e-13);
        }
    }

    #[test]
    fn harris_yule_and_critical() {
        let hy = OffspringLaw::harris_yule(2).unwrap();
        assert_eq!(fixed_points(&hy).unwrap(), (0.0, 1.0));
        let crit = OffspringLaw::finite(vec![0.5, 0.0, 0.5], 0.0).unwrap();
        assert_eq!(fixed_points(&crit).unwrap(), (1.0, 1.0));
        assert_eq!(profile(&crit).unwrap().regime, Regime::Critical);
    }

    #[test]
    fn supercritical_quadratic() {
        let law = OffspringLaw::finite(vec![0.2, 0.0, 0.8], 0.0).unwrap();
        let p = profile(&law).unwrap();
        assert!((p.q - 0.25).abs() < 1e-15);
        assert_eq!(p.r, 1.0);
        assert!((p.alpha - 0.6).abs() < 1e-14 && (p.beta - 0.6).abs() < 1e-14);
        assert_eq!(p.regime, Regime::Supercritical);
    }

    #[test]
    fn power_fractional_rates() {
        let (a, theta) = (0.5, 0.5);
        let law = OffspringLaw::power_fractional(0.5, 2.0, a, theta).unwrap();
        let p = profile(&law).unwrap();
        assert!((p.q - 0.5).abs() < 1e-15 && p.r == 2.0);
        assert!((p.alpha - (1.0 - a)).abs() < 1e-14);
        assert!((p.beta - (a.powf(-1.0 / theta) - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn subcritical_non_defective() {
        let law = OffspringLaw::finite(vec![0.6, 0.0, 0.4], 0.0).unwrap();
        let p = profile(&law).unwrap();
        assert_eq!(p.q, 1.0);
        assert!((p.r - 1.5).abs() < 1e-14);
        assert_eq!(p.regime, Regime::SubcriticalExtendable);
    }

    #[test]
    fn mlf_pole_bracket() {
        let law = OffspringLaw::mlf_from_shape(0.5, 2.0, 0.6, 0.5).unwrap();
        let (q, r) = fixed_points(&law).unwrap();
        assert!((q - 0.5).abs() < 1e-14 && (r - 2.0).abs() < 1e-13);
        let p = profile(&law).unwrap();
        assert!((p.alpha - 0.6).abs() < 1e-12 && (p.gamma - 0.5).abs() < 1e-12);
    }
}
