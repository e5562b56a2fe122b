//! Tail generating functions as confluent divided differences.
//!
//! `v^{(n)}(s_1..s_n)` is the divided difference of order `n - 1` of `v` over
//! the multiset `{s_i}`. Tight clusters of points are expanded from a Taylor
//! jet at the cluster centre, which covers exact coincidences and avoids the
//! cancellation of the plain recursion for nearby points.

use crate::error::{Error, Result};
use crate::numeric::{Point, Series};

/// A function that is analytic on a disc `|z| < radius` and can report Taylor
/// jets at real centres.
pub trait Analytic {
    fn value<T: Point>(&self, z: T) -> Result<T>;

    /// Taylor coefficients at the real point `c`, `len` terms.
    fn jet(&self, c: f64, len: usize) -> Result<Series>;

    fn radius(&self) -> f64;

    /// Radius of convergence of the jet at `c`.
    fn jet_radius(&self, c: f64) -> f64 {
        self.radius() - c
    }

    /// `Some(d)` when the function is a polynomial of degree `d`.
    fn exact_degree(&self) -> Option<usize> {
        None
    }

    /// `f^{(m)}(R)/m!` at the finite radius, `+inf` if it diverges.
    fn boundary_taylor(&self, _m: usize) -> f64 {
        f64::INFINITY
    }

    /// `f[R, s]` when it has a cancellation-free closed form.
    fn slope_to_radius(&self, _s: f64) -> Option<f64> {
        None
    }
}

/// Extra Taylor terms used beyond the divided-difference order.
const JET_EXTRA: usize = 24;
/// Clusters narrower than this fraction of the jet radius are expanded.
const CLUSTER_FRACTION: f64 = 0.1;

/// `f^{(n)}(s_1..s_n)` for `n = points.len() >= 1`.
pub fn tail_gf<A: Analytic + ?Sized, T: Point>(f: &A, points: &[T]) -> Result<T> {
    if points.is_empty() {
        return Err(Error::Spec(
            "tail generating function needs at least one argument".into(),
        ));
    }
    let radius = f.radius();
    for &z in points {
        let bad = !(z.re().is_finite() && z.im().is_finite())
            || z.modulus() > radius
            || (z.im() == 0.0 && z.re() < 0.0);
        if bad {
            return Err(Error::Domain {
                value: z.re(),
                lo: 0.0,
                hi: radius,
            });
        }
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re().total_cmp(&b.re()).then(a.im().total_cmp(&b.im())));

    if let Some(degree) = f.exact_degree() {
        let c = pts.iter().map(|z| z.re()).sum::<f64>() / pts.len() as f64;
        let jet = f.jet(c, degree + 1)?;
        return Ok(jet_divided_difference(&jet, &pts, c));
    }

    let n = pts.len();
    // table[i] holds f[z_i..z_{i+k}] for the current order k.
    let mut table: Vec<T> = Vec::with_capacity(n);
    for i in 0..n {
        table.push(cluster_value(f, &pts[i..=i])?);
    }
    for k in 1..n {
        for i in 0..n - k {
            let cluster = &pts[i..=i + k];
            table[i] = match cluster_value_if_tight(f, cluster)? {
                Some(v) => v,
                None => {
                    let (lo, hi) = (pts[i], pts[i + k]);
                    match (k, radius_slope(f, lo, hi, radius)) {
                        (1, Some(v)) => T::from_real(v),
                        _ => (table[i + 1] - table[i]) / (hi - lo),
                    }
                }
            };
        }
    }
    Ok(table[0])
}

fn radius_slope<A: Analytic + ?Sized, T: Point>(f: &A, lo: T, hi: T, radius: f64) -> Option<f64> {
    if lo.im() != 0.0 || hi.im() != 0.0 {
        return None;
    }
    if hi.re() == radius {
        f.slope_to_radius(lo.re())
    } else {
        None
    }
}

/// Value of a single-point or tight cluster; errors if neither applies.
fn cluster_value<A: Analytic + ?Sized, T: Point>(f: &A, cluster: &[T]) -> Result<T> {
    if cluster.len() == 1 {
        return f.value(cluster[0]);
    }
    cluster_value_if_tight(f, cluster)?.ok_or_else(|| Error::Spec("cluster is not tight".into()))
}

fn cluster_value_if_tight<A: Analytic + ?Sized, T: Point>(
    f: &A,
    cluster: &[T],
) -> Result<Option<T>> {
    let k = cluster.len() - 1;
    let radius = f.radius();
    let all_at_radius = cluster.iter().all(|z| z.im() == 0.0 && z.re() == radius);
    if all_at_radius {
        let v = f.boundary_taylor(k);
        if !v.is_finite() {
            return Err(Error::Divergent(format!(
                "derivative of order {k} is infinite at the boundary {radius}"
            )));
        }
        return Ok(Some(T::from_real(v)));
    }
    let c = cluster.iter().map(|z| z.re()).sum::<f64>() / cluster.len() as f64;
    let spread = cluster.iter().map(|z| z.dist(c)).fold(0.0, f64::max);
    if k > 0 && spread > CLUSTER_FRACTION * f.jet_radius(c) {
        return Ok(None);
    }
    if k == 0 {
        return f.value(cluster[0]).map(Some);
    }
    // An exact coincidence only needs the k-th coefficient.
    let len = if spread == 0.0 { k + 1 } else { k + JET_EXTRA };
    let jet = f.jet(c, len)?;
    Ok(Some(jet_divided_difference(&jet, cluster, c)))
}

/// `f[z_0..z_k] = sum_{m >= k} a_m h_{m-k}(z_0 - c, .., z_k - c)` with `h` the
/// complete homogeneous symmetric polynomials and `a_m` the jet at `c`.
pub fn jet_divided_difference<T: Point>(jet: &Series, points: &[T], c: f64) -> T {
    let k = points.len() - 1;
    if jet.len() <= k {
        return T::zero();
    }
    let terms = jet.len() - k;
    let mut h = vec![T::zero(); terms];
    h[0] = T::from_real(1.0);
    for &z in points {
        let d = z - c;
        for l in 1..terms {
            h[l] = h[l] + d * h[l - 1];
        }
    }
    let mut acc = T::zero();
    for l in (0..terms).rev() {
        acc = acc + h[l] * jet.coeff(k + l);
    }
    acc
}

/// Tail generating function from the defining coefficient sum
/// `sum_m p_{m+n-1} h_m(s_1..s_n)` for a finite coefficient list.
pub fn finite_tail_sum(p: &[f64], points: &[f64]) -> f64 {
    let n = points.len();
    assert!(n >= 1, "need at least one point");
    if p.len() < n {
        return 0.0;
    }
    let terms = p.len() + 1 - n;
    let mut h = vec![0.0; terms];
    h[0] = 1.0;
    for &s in points {
        for l in 1..terms {
            h[l] += s * h[l - 1];
        }
    }
    (0..terms).map(|m| p[m + n - 1] * h[m]).sum()
}
