//! Offspring laws: possibly defective probability generating functions.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::divdiff::{self, Analytic};
use crate::error::{Error, Result};
use crate::numeric::cauchy::cauchy_coefficients;
use crate::numeric::quad::{integrate, QuadOptions};
use crate::numeric::{Point, Scalar, Series};

/// Keyed document form of a law, as read from JSON files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    Finite {
        p: Vec<f64>,
        #[serde(default)]
        defect: f64,
    },
    Mlf {
        p0: f64,
        p1: f64,
        #[serde(default)]
        p_delta: f64,
        p: f64,
    },
    Trifurcation {
        p0: f64,
        p2: f64,
        p3: f64,
    },
    PowerFractional {
        q: f64,
        r: f64,
        a: f64,
        theta: f64,
    },
    HarrisYule {
        k: u32,
    },
    MutationStopped {
        base: Box<LawSpec>,
        mu: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum LawKind {
    FiniteSupport {
        p: Vec<f64>,
        defect: f64,
    },
    ModifiedLinearFractional {
        p0: f64,
        p1: f64,
        p_delta: f64,
        p: f64,
    },
    Trifurcation {
        p0: f64,
        p2: f64,
        p3: f64,
    },
    PowerFractional {
        q: f64,
        r: f64,
        a: f64,
        theta: f64,
    },
    HarrisYule {
        k: u32,
    },
    MutationStopped {
        base: Box<OffspringLaw>,
        mu: f64,
    },
}

/// A validated offspring law. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LawSpec", into = "LawSpec")]
pub struct OffspringLaw {
    kind: LawKind,
}

fn check_prob(name: &str, v: f64, allow_one: bool) -> Result<()> {
    let ok = v.is_finite() && v >= 0.0 && (if allow_one { v <= 1.0 } else { v < 1.0 });
    if ok {
        Ok(())
    } else {
        let range = if allow_one { "[0, 1]" } else { "[0, 1)" };
        Err(Error::InvalidLaw(format!("{name} = {v} is not in {range}")))
    }
}

impl OffspringLaw {
    pub fn finite(p: Vec<f64>, defect: f64) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidLaw("empty coefficient list".into()));
        }
        for (k, &pk) in p.iter().enumerate() {
            check_prob(&format!("p_{k}"), pk, true)?;
        }
        // defect = 1 (every split kills) is allowed for the simulator.
        check_prob("defect", defect, true)?;
        let total: f64 = p.iter().sum::<f64>() + defect;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidLaw(format!(
                "probabilities and defect sum to {total}, not 1"
            )));
        }
        if p.get(1).copied() == Some(1.0) {
            return Err(Error::InvalidLaw("trivial law p_1 = 1".into()));
        }
        let mut p = p;
        while p.len() > 1 && *p.last().unwrap() == 0.0 {
            p.pop();
        }
        Ok(Self {
            kind: LawKind::FiniteSupport { p, defect },
        })
    }

    pub fn mlf(p0: f64, p1: f64, p_delta: f64, p: f64) -> Result<Self> {
        check_prob("p0", p0, false)?;
        check_prob("p1", p1, false)?;
        check_prob("p_delta", p_delta, false)?;
        check_prob("p", p, false)?;
        if p0 + p1 + p_delta >= 1.0 {
            return Err(Error::InvalidLaw(format!(
                "p0 + p1 + p_delta = {} must be < 1",
                p0 + p1 + p_delta
            )));
        }
        Ok(Self {
            kind: LawKind::ModifiedLinearFractional { p0, p1, p_delta, p },
        })
    }

    pub fn trifurcation(p0: f64, p2: f64, p3: f64) -> Result<Self> {
        check_prob("p0", p0, false)?;
        check_prob("p2", p2, false)?;
        check_prob("p3", p3, true)?;
        if p3 <= 0.0 {
            return Err(Error::InvalidLaw("trifurcation needs p3 > 0".into()));
        }
        if p0 + p2 + p3 > 1.0 + 1e-15 {
            return Err(Error::InvalidLaw(format!(
                "p0 + p2 + p3 = {} exceeds 1",
                p0 + p2 + p3
            )));
        }
        Ok(Self {
            kind: LawKind::Trifurcation { p0, p2, p3 },
        })
    }

    pub fn power_fractional(q: f64, r: f64, a: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidLaw(format!("q = {q} not in [0, 1]")));
        }
        if !(r > 1.0 && r.is_finite()) {
            return Err(Error::InvalidLaw(format!(
                "r = {r} must satisfy 1 < r < inf"
            )));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidLaw(format!("a = {a} not in (0, 1)")));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidLaw(format!("theta = {theta} not in (0, 1)")));
        }
        Ok(Self {
            kind: LawKind::PowerFractional { q, r, a, theta },
        })
    }

    pub fn harris_yule(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidLaw("Harris-Yule needs k >= 1".into()));
        }
        Ok(Self {
            kind: LawKind::HarrisYule { k },
        })
    }

    pub fn mutation_stopped(base: OffspringLaw, mu: f64) -> Result<Self> {
        check_prob("mu", mu, false)?;
        let f1 = base.eval(1.0);
        if (f1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidLaw(format!(
                "mutation base must be non-defective, f(1) = {f1}"
            )));
        }
        Ok(Self {
            kind: LawKind::MutationStopped {
                base: Box::new(base),
                mu,
            },
        })
    }

    /// The modified linear-fractional law with fixed points `(q, r)` and rates `(alpha, gamma)`.
    pub fn mlf_from_shape(q: f64, r: f64, alpha: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Constraint(format!("0 <= q <= 1 violated (q = {q})")));
        }
        if !(r >= 1.0 && r.is_finite()) {
            return Err(Error::Constraint(format!(
                "1 <= r < inf violated (r = {r})"
            )));
        }
        if q >= r {
            return Err(Error::Constraint(format!("q < r violated ({q} >= {r})")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Constraint(format!(
                "alpha in (0,1) violated ({alpha})"
            )));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Constraint(format!(
                "gamma in (0,1] violated ({gamma})"
            )));
        }
        let bound = 1.0 - gamma + (r - q).powi(2) * gamma / (r * r - gamma * q * q);
        if alpha > bound * (1.0 + 1e-14) {
            return Err(Error::Constraint(format!(
                "alpha <= 1 - gamma + (r-q)^2 gamma / (r^2 - gamma q^2) violated ({alpha} > {bound})"
            )));
        }
        let rq = r - gamma * q;
        let p0 = alpha * q * r / rq;
        let mut p1 = 1.0 - alpha * (r * r - gamma * q * q) / (rq * rq);
        if p1 < 0.0 && p1 > -1e-14 {
            p1 = 0.0;
        }
        let p_delta = alpha * (r - 1.0) * (1.0 - q) / (r - 1.0 + gamma * (1.0 - q));
        let p = (1.0 - gamma) / rq;
        Self::mlf(p0, p1, p_delta, p)
    }

    /// The law `(1 - eps) f`, which adds `eps` to the defect.
    pub fn scaled(&self, eps: f64) -> Result<Self> {
        check_prob("eps", eps, false)?;
        let w = 1.0 - eps;
        match &self.kind {
            LawKind::FiniteSupport { p, defect } => {
                let p: Vec<f64> = p.iter().map(|v| v * w).collect();
                Self::finite(p, defect * w + eps)
            }
            LawKind::ModifiedLinearFractional { p0, p1, p_delta, p } => {
                let tail = (1.0 - p0 - p1 - p_delta) * w;
                let (p0, p1) = (p0 * w, p1 * w);
                Self::mlf(p0, p1, 1.0 - p0 - p1 - tail, *p)
            }
            LawKind::Trifurcation { p0, p2, p3 } => Self::trifurcation(p0 * w, p2 * w, p3 * w),
            LawKind::HarrisYule { k } => {
                let mut p = vec![0.0; *k as usize + 2];
                p[*k as usize + 1] = w;
                Self::finite(p, eps)
            }
            LawKind::MutationStopped { .. } | LawKind::PowerFractional { .. } => {
                Err(Error::InvalidLaw(format!(
                    "scaling is not supported for {}",
                    self.family_name()
                )))
            }
        }
    }

    pub fn kind(&self) -> &LawKind {
        &self.kind
    }

    pub fn family_name(&self) -> &'static str {
        match self.kind {
            LawKind::FiniteSupport { .. } => "finite",
            LawKind::ModifiedLinearFractional { .. } => "mlf",
            LawKind::Trifurcation { .. } => "trifurcation",
            LawKind::PowerFractional { .. } => "power_fractional",
            LawKind::HarrisYule { .. } => "harris_yule",
            LawKind::MutationStopped { .. } => "mutation_stopped",
        }
    }

    /// Radius of convergence (upper end of the domain).
    pub fn radius(&self) -> f64 {
        match &self.kind {
            LawKind::FiniteSupport { .. }
            | LawKind::Trifurcation { .. }
            | LawKind::HarrisYule { .. } => f64::INFINITY,
            LawKind::ModifiedLinearFractional { p0, p1, p_delta, p } => {
                if *p == 0.0 || 1.0 - p0 - p1 - p_delta == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / p
                }
            }
            LawKind::PowerFractional { r, .. } => *r,
            LawKind::MutationStopped { base, mu } => base.radius() / (1.0 - mu),
        }
    }

    /// Polynomial degree, if the law is a polynomial.
    pub fn degree(&self) -> Option<usize> {
        match &self.kind {
            LawKind::FiniteSupport { p, .. } => Some(p.len() - 1),
            LawKind::Trifurcation { .. } => Some(3),
            LawKind::HarrisYule { k } => Some(*k as usize + 1),
            LawKind::ModifiedLinearFractional { p0, p1, p_delta, p } => {
                if *p == 0.0 || 1.0 - p0 - p1 - p_delta == 0.0 {
                    Some(2)
                } else {
                    None
                }
            }
            LawKind::MutationStopped { base, .. } => base.degree(),
            LawKind::PowerFractional { .. } => None,
        }
    }

    /// Explicit defect `1 - f(1)`.
    pub fn defect(&self) -> f64 {
        match &self.kind {
            LawKind::FiniteSupport { defect, .. } => *defect,
            LawKind::ModifiedLinearFractional { p_delta, .. } => *p_delta,
            _ => 1.0 - self.eval(1.0),
        }
    }

    /// `f(s)` for any scalar type; no domain checks.
    pub fn eval<T: Scalar>(&self, s: T) -> T {
        match &self.kind {
            LawKind::FiniteSupport { p, .. } => {
                let mut acc = s.constant(0.0);
                for &c in p.iter().rev() {
                    acc = acc * s.clone() + c;
                }
                acc
            }
            LawKind::ModifiedLinearFractional { p0, p1, p_delta, p } => {
                let c = 1.0 - p0 - p1 - p_delta;
                let quad = s.clone() * s.clone() * (c * (1.0 - p));
                let denom = s.constant(1.0) - s.clone() * *p;
                quad / denom + s * *p1 + *p0
            }
            LawKind::Trifurcation { p0, p2, p3 } => (s.clone() * *p3 + *p2) * s.clone() * s + *p0,
            LawKind::PowerFractional { q, r, a, theta } => {
                let inner = (s.constant(*r) - s.clone()).powf(-theta) * *a
                    + (1.0 - a) * (r - q).powf(-theta);
                -inner.powf(-1.0 / theta) + *r
            }
            LawKind::HarrisYule { k } => s.powi(k + 1),
            LawKind::MutationStopped { base, mu } => base.eval(s * (1.0 - mu)),
        }
    }

    /// Checked real evaluation on `[0, radius)`.
    pub fn evaluate(&self, s: f64) -> Result<f64> {
        let r = self.radius();
        if !(0.0..r).contains(&s) {
            return Err(Error::Domain {
                value: s,
                lo: 0.0,
                hi: r,
            });
        }
        Ok(self.eval(s))
    }

    /// Taylor jet `f(c + h)` truncated to `len` terms.
    pub fn jet(&self, c: f64, len: usize) -> Series {
        self.eval(Series::variable(c, len))
    }

    /// `f^{(m)}(R)/m!` at the finite radius `R`; `+inf` when it diverges.
    pub fn boundary_taylor(&self, m: usize) -> f64 {
        match &self.kind {
            LawKind::PowerFractional { r, a, theta, .. } => match m {
                0 => *r,
                1 => a.powf(-1.0 / theta),
                _ => f64::INFINITY,
            },
            LawKind::MutationStopped { base, mu } => {
                base.boundary_taylor(m) * (1.0 - mu).powi(m as i32)
            }
            _ => f64::INFINITY,
        }
    }

    /// `m`-th derivative at `s`, allowing `s = radius` (possibly `+inf`).
    pub fn derivative(&self, s: f64, order: usize) -> Result<f64> {
        let r = self.radius();
        if !(0.0..=r).contains(&s) {
            return Err(Error::Domain {
                value: s,
                lo: 0.0,
                hi: r,
            });
        }
        let fact: f64 = (1..=order).map(|i| i as f64).product();
        if s == r {
            return Ok(self.boundary_taylor(order) * fact);
        }
        let len = match self.degree() {
            Some(d) => (order + 1).max(d + 1),
            None => order + 1,
        };
        Ok(self.jet(s, len).coeff(order) * fact)
    }

    /// `(m1, m2, m3) = (f'(1), f''(1)/2, f'''(1)/6)`.
    pub fn moments(&self) -> (f64, f64, f64) {
        let j = self.jet(1.0, 4);
        (j.coeff(1), j.coeff(2), j.coeff(3))
    }

    /// Offspring probabilities `p_0..p_{n-1}`.
    pub fn coefficients(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        match &self.kind {
            LawKind::FiniteSupport { p, .. } => {
                for (o, &v) in out.iter_mut().zip(p) {
                    *o = v;
                }
            }
            LawKind::ModifiedLinearFractional { p0, p1, p_delta, p } => {
                let c = 1.0 - p0 - p1 - p_delta;
                let mut geo = c * (1.0 - p);
                for (k, o) in out.iter_mut().enumerate() {
                    *o = match k {
                        0 => *p0,
                        1 => *p1,
                        _ => {
                            let v = geo;
                            geo *= p;
                            v
                        }
                    };
                }
            }
            LawKind::Trifurcation { p0, p2, p3 } => {
                for (k, v) in [(0, *p0), (2, *p2), (3, *p3)] {
                    if k < n {
                        out[k] = v;
                    }
                }
            }
            LawKind::HarrisYule { k } => {
                let k = *k as usize + 1;
                if k < n {
                    out[k] = 1.0;
                }
            }
            LawKind::MutationStopped { base, mu } => {
                let mut w = 1.0;
                for (o, b) in out.iter_mut().zip(base.coefficients(n)) {
                    *o = b * w;
                    w *= 1.0 - mu;
                }
            }
            LawKind::PowerFractional { .. } => return self.scaled_coefficients(1.0, n),
        }
        out
    }

    /// `p_k a^k` for `k < n`, computed without under- or overflow of `a^k`.
    pub fn scaled_coefficients(&self, a: f64, n: usize) -> Vec<f64> {
        match &self.kind {
            LawKind::PowerFractional { r, .. } => {
                let nodes = (8 * n).max(1024).next_power_of_two();
                let rho = r / a * (1.0 - 16.0 / nodes as f64);
                let c = cauchy_coefficients(|z: Complex64| Ok(self.eval(z * a)), rho, nodes, n)
                    .expect("node count exceeds coefficient count");
                c.into_iter().map(|v| v.max(0.0)).collect()
            }
            _ => {
                let mut w = 1.0;
                self.coefficients(n)
                    .into_iter()
                    .map(|p| {
                        let v = p * w;
                        w *= a;
                        v
                    })
                    .collect()
            }
        }
    }

    /// `sum_{k>=2} p_k a^k k^n ln k`, `+inf` when the series diverges.
    pub fn xlogx_moment(&self, a: f64, n: u32) -> f64 {
        let term =
            |k: usize, pk: f64| pk * a.powi(k as i32) * (k as f64).powi(n as i32) * (k as f64).ln();
        match &self.kind {
            LawKind::FiniteSupport { .. }
            | LawKind::Trifurcation { .. }
            | LawKind::HarrisYule { .. } => {
                let d = self.degree().unwrap();
                self.coefficients(d + 1)
                    .iter()
                    .enumerate()
                    .skip(2)
                    .map(|(k, &pk)| term(k, pk))
                    .sum()
            }
            LawKind::ModifiedLinearFractional { p0, p1, p_delta, p } => {
                let c = 1.0 - p0 - p1 - p_delta;
                if c == 0.0 {
                    return 0.0;
                }
                if *p == 0.0 {
                    return term(2, c);
                }
                if a * p >= 1.0 {
                    return f64::INFINITY;
                }
                // Geometric tail: sum until the terms are negligible and decreasing.
                // p_k a^k = c (1 - p) a^2 (a p)^{k-2} is carried as one product.
                let ratio = a * p;
                let mut w = c * (1.0 - p) * a * a;
                let mut sum = 0.0;
                let mut prev = f64::INFINITY;
                for k in 2..50_000_000usize {
                    let kf = k as f64;
                    let t = w * kf.powi(n as i32) * kf.ln();
                    sum += t;
                    if t < prev && t <= 1e-17 * sum {
                        break;
                    }
                    prev = t;
                    w *= ratio;
                }
                sum
            }
            LawKind::MutationStopped { base, mu } => base.xlogx_moment(a * (1.0 - mu), n),
            LawKind::PowerFractional { r, theta, .. } => {
                if a > *r {
                    return f64::INFINITY;
                }
                if a == *r && (n as f64) >= 1.0 + theta {
                    return f64::INFINITY;
                }
                let len = if a < *r {
                    // Terms decay like (a/r)^k; choose enough of them.
                    let ratio = a / r;
                    ((40.0 / -ratio.ln()).ceil() as usize).clamp(64, 1 << 16)
                } else {
                    4096
                };
                let p = self.scaled_coefficients(a, len);
                let term = |k: usize, v: f64| v * (k as f64).powi(n as i32) * (k as f64).ln();
                let mut sum: f64 = p.iter().enumerate().skip(2).map(|(k, &v)| term(k, v)).sum();
                if a == *r {
                    // p_k r^k ~ C k^{-2-theta}: fit C at the last index and add the tail integral.
                    let k0 = len - 1;
                    let c = p[k0] * (k0 as f64).powf(2.0 + theta);
                    let e = 2.0 + theta - n as f64;
                    let kk = k0 as f64 + 0.5;
                    sum += c * kk.powf(1.0 - e) * (kk.ln() / (e - 1.0) + 1.0 / (e - 1.0).powi(2));
                }
                sum
            }
        }
    }

    /// `int_0^a f^{(n+2)}(a, ..., a, x) dx` by adaptive quadrature.
    pub fn xlogx_integral(&self, a: f64, n: u32) -> Result<f64> {
        let radius = self.radius();
        if a > radius {
            return Ok(f64::INFINITY);
        }
        let integrand = |x: f64| -> Result<f64> {
            let mut pts = vec![a; n as usize + 1];
            pts.push(x);
            divdiff::tail_gf(self, &pts)
        };
        let opts = QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-14,
            ..QuadOptions::default()
        };
        if a < radius {
            return Ok(integrate(integrand, 0.0, a, opts)?.value);
        }
        for m in 0..=n as usize {
            if !self.boundary_taylor(m).is_finite() {
                return Ok(f64::INFINITY);
            }
        }
        // Integrable singularity at the radius: substitute x = a - u^2.
        let top = a.sqrt();
        Ok(integrate(|u: f64| Ok(2.0 * u * integrand(a - u * u)?), 0.0, top, opts)?.value)
    }

    /// Exact coefficient-sum form of [`Self::xlogx_integral`] for polynomial laws.
    pub fn xlogx_integral_exact(&self, a: f64, n: u32) -> Result<f64> {
        let d = self
            .degree()
            .ok_or_else(|| Error::InvalidLaw("exact route needs a polynomial law".into()))?;
        let p = self.coefficients(d + 1);
        let n = n as usize;
        let mut total = 0.0;
        // v^{(n+2)}(a,..,a,x) = sum_i x^i sum_{j>=n} a^{j-n} C(j,n) p_{i+j+1}
        for i in 0..=d {
            let mut inner = 0.0;
            for j in n..=d {
                if i + j + 1 > d {
                    break;
                }
                inner += a.powi((j - n) as i32) * binomial(j, n) * p[i + j + 1];
            }
            total += inner * a.powi(i as i32 + 1) / (i as f64 + 1.0);
        }
        Ok(total)
    }

    pub fn to_spec(&self) -> LawSpec {
        self.clone().into()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Analytic for OffspringLaw {
    fn value<T: Point>(&self, z: T) -> Result<T> {
        let r = self.radius();
        if z.im() == 0.0 && z.re() == r {
            let v = self.boundary_taylor(0);
            if v.is_finite() {
                return Ok(T::from_real(v));
            }
            return Err(Error::Divergent(format!("f({r}) is infinite")));
        }
        Ok(self.eval(z))
    }

    fn jet(&self, c: f64, len: usize) -> Result<Series> {
        Ok(OffspringLaw::jet(self, c, len))
    }

    fn radius(&self) -> f64 {
        OffspringLaw::radius(self)
    }

    fn exact_degree(&self) -> Option<usize> {
        self.degree()
    }

    fn boundary_taylor(&self, m: usize) -> f64 {
        OffspringLaw::boundary_taylor(self, m)
    }

    fn slope_to_radius(&self, s: f64) -> Option<f64> {
        match &self.kind {
            LawKind::PowerFractional { q, r, a, theta } => {
                // f[r, s] = {a + (1-a) (r-s)^theta (r-q)^-theta}^{-1/theta}
                let u = a + (1.0 - a) * ((r - s) / (r - q)).powf(*theta);
                Some(u.powf(-1.0 / theta))
            }
            _ => None,
        }
    }
}

impl TryFrom<LawSpec> for OffspringLaw {
    type Error = Error;
    fn try_from(spec: LawSpec) -> Result<Self> {
        match spec {
            LawSpec::Finite { p, defect } => Self::finite(p, defect),
            LawSpec::Mlf { p0, p1, p_delta, p } => Self::mlf(p0, p1, p_delta, p),
            LawSpec::Trifurcation { p0, p2, p3 } => Self::trifurcation(p0, p2, p3),
            LawSpec::PowerFractional { q, r, a, theta } => Self::power_fractional(q, r, a, theta),
            LawSpec::HarrisYule { k } => Self::harris_yule(k),
            LawSpec::MutationStopped { base, mu } => {
                Self::mutation_stopped(Self::try_from(*base)?, mu)
            }
        }
    }
}

impl From<OffspringLaw> for LawSpec {
    fn from(law: OffspringLaw) -> Self {
        match law.kind {
            LawKind::FiniteSupport { p, defect } => LawSpec::Finite { p, defect },
            LawKind::ModifiedLinearFractional { p0, p1, p_delta, p } => {
                LawSpec::Mlf { p0, p1, p_delta, p }
            }
            LawKind::Trifurcation { p0, p2, p3 } => LawSpec::Trifurcation { p0, p2, p3 },
            LawKind::PowerFractional { q, r, a, theta } => {
                LawSpec::PowerFractional { q, r, a, theta }
            }
            LawKind::HarrisYule { k } => LawSpec::HarrisYule { k },
            LawKind::MutationStopped { base, mu } => LawSpec::MutationStopped {
                base: Box::new((*base).into()),
                mu,
            },
        }
    }
}

impl OffspringLaw {
    /// Parse a JSON law document.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("law specs always serialize")
    }
}

impl fmt::Display for OffspringLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary() -> OffspringLaw {
        OffspringLaw::finite(vec![0.4, 0.0, 0.4], 0.2).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert!((binary().evaluate(1.0).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(
            OffspringLaw::harris_yule(1).unwrap().evaluate(0.5).unwrap(),
            0.25
        );
        let degenerate = OffspringLaw::mlf(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(degenerate.evaluate(0.5).unwrap(), 0.25);
        assert!(matches!(
            OffspringLaw::mlf(0.1, 0.1, 0.1, 0.5).unwrap().evaluate(2.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn derivative_examples() {
        assert!((binary().derivative(1.0, 1).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(binary().derivative(0.3, 0).unwrap(), binary().eval(0.3));
        let pf = OffspringLaw::power_fractional(0.5, 2.0, 0.5, 0.5).unwrap();
        assert_eq!(pf.derivative(2.0, 2).unwrap(), f64::INFINITY);
        assert!((pf.derivative(2.0, 1).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn moment_examples() {
        let crit = OffspringLaw::mlf(0.5, 1.0 - 0.5 * 1.75, 0.0, 0.25).unwrap();
        let (m1, m2, m3) = crit.moments();
        assert!((m1 - 1.0).abs() < 1e-14);
        assert!((m2 - 2.0 / 3.0).abs() < 1e-14);
        assert!((m3 - 2.0 / 9.0).abs() < 1e-14);
        let (m1, m2, m3) = OffspringLaw::finite(vec![0.5, 0.0, 0.5], 0.0)
            .unwrap()
            .moments();
        assert_eq!((m1, m2, m3), (1.0, 0.5, 0.0));
        assert_eq!(
            OffspringLaw::harris_yule(1).unwrap().moments(),
            (2.0, 1.0, 0.0)
        );
    }

    #[test]
    fn mlf_from_shape_examples() {
        let law = OffspringLaw::mlf_from_shape(0.5, 2.0, 0.6, 1.0).unwrap();
        match law.kind() {
            LawKind::ModifiedLinearFractional { p0, p1, p_delta, p } => {
                assert!((p0 - 0.4).abs() < 1e-15);
                assert!(p1.abs() < 1e-15);
                assert!((p_delta - 0.2).abs() < 1e-15);
                assert_eq!(*p, 0.0);
            }
            _ => unreachable!(),
        }
        // (q, r) = (0, 1): h(s) = (1 - alpha) s + alpha gamma s^2 / (1 - (1 - gamma) s)
        let (alpha, gamma) = (0.3, 0.6);
        let h = OffspringLaw::mlf_from_shape(0.0, 1.0, alpha, gamma).unwrap();
        for s in [0.1, 0.5, 0.9] {
            let expected = (1.0 - alpha) * s + alpha * gamma * s * s / (1.0 - (1.0 - gamma) * s);
            assert!((h.eval(s) - expected).abs() < 1e-15);
        }
        assert!(matches!(
            OffspringLaw::mlf_from_shape(0.5, 2.0, 0.99, 0.5),
            Err(Error::Constraint(_))
        ));
    }

    #[test]
    fn linear_fractional_when_alpha_is_one_minus_gamma() {
        let (q, r, gamma) = (0.3, 1.8, 0.4);
        let law = OffspringLaw::mlf_from_shape(q, r, 1.0 - gamma, gamma).unwrap();
        let LawKind::ModifiedLinearFractional { p0, p1, p_delta, p } = *law.kind() else {
            unreachable!()
        };
        // p1 = (1 - p0 - p_delta)(1 - p) is the plain linear-fractional member.
        assert!((p1 - (1.0 - p0 - p_delta) * (1.0 - p)).abs() < 1e-14);
    }

    #[test]
    fn xlogx_moment_examples() {
        let sq = OffspringLaw::finite(vec![0.0, 0.0, 1.0], 0.0).unwrap();
        assert!((sq.xlogx_moment(1.0, 0) - 2f64.ln()).abs() < 1e-15);
        let m = OffspringLaw::mlf(0.2, 0.1, 0.1, 0.5).unwrap();
        assert_eq!(m.xlogx_moment(2.0, 1), f64::INFINITY);
        assert!(m.xlogx_moment(1.5, 1).is_finite());
    }

    #[test]
    fn xlogx_integral_examples() {
        let sq = OffspringLaw::finite(vec![0.0, 0.0, 1.0], 0.0).unwrap();
        assert!((sq.xlogx_integral(1.0, 0).unwrap() - 1.5).abs() < 1e-13);
        assert!((sq.xlogx_integral_exact(1.0, 0).unwrap() - 1.5).abs() < 1e-15);
        let pf = OffspringLaw::power_fractional(0.5, 2.0, 0.5, 0.5).unwrap();
        assert!(pf.xlogx_integral(2.0, 1).unwrap().is_finite());
        assert_eq!(pf.xlogx_integral(2.0, 2).unwrap(), f64::INFINITY);
    }

    #[test]
    fn coefficients_of_power_fractional_sum_to_f1() {
        let pf = OffspringLaw::power_fractional(0.5, 2.0, 0.5, 0.5).unwrap();
        let p = pf.coefficients(256);
        let s: f64 = p.iter().sum();
        assert!((s - pf.eval(1.0)).abs() < 1e-10, "{s} vs {}", pf.eval(1.0));
        let s05: f64 = p
            .iter()
            .enumerate()
            .map(|(k, v)| v * 0.5f64.powi(k as i32))
            .sum();
        assert!((s05 - pf.eval(0.5)).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"type":"finite","p":[0.4,0.0,0.4],"defect":0.2}"#;
        let law = OffspringLaw::from_json(text).unwrap();
        assert_eq!(law, binary());
        let again = OffspringLaw::from_json(&law.to_json()).unwrap();
        assert_eq!(again, law);
        let nested = OffspringLaw::mutation_stopped(binary_nondefective(), 0.1).unwrap();
        assert_eq!(OffspringLaw::from_json(&nested.to_json()).unwrap(), nested);
        assert!(OffspringLaw::from_json(r#"{"type":"finite","p":[0.5,0.4]}"#).is_err());
    }

    fn binary_nondefective() -> OffspringLaw {
        OffspringLaw::finite(vec![0.25, 0.25, 0.5], 0.0).unwrap()
    }

    #[test]
    fn scaled_adds_defect() {
        let base = OffspringLaw::finite(vec![0.5, 0.0, 0.5], 0.0).unwrap();
        let s = base.scaled(1e-3).unwrap();
        assert!((s.eval(1.0) - (1.0 - 1e-3)).abs() < 1e-15);
        let m = OffspringLaw::mlf(0.5, 0.125, 0.0, 0.25)
            .unwrap()
            .scaled(0.01)
            .unwrap();
        assert!((m.eval(1.0) - 0.99).abs() < 1e-14);
    }
}
