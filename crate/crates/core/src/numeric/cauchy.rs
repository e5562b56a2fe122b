//! Taylor coefficients from values on a circle (trapezoidal Cauchy integral).

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Returns `c_0..c_{n-1}` of `g(z) = sum c_k z^k` from `nodes` samples of `g`
/// on the circle `|z| = rho`.
pub fn cauchy_coefficients<G>(g: G, rho: f64, nodes: usize, n: usize) -> Result<Vec<f64>>
where
    G: FnMut(Complex64) -> Result<Complex64>,
{
    if n > nodes {
        return Err(Error::Extraction(format!(
            "{n} coefficients need at least as many nodes (have {nodes})"
        )));
    }
    let samples = circle_samples(g, rho, nodes)?;
    Ok(coefficients_from_samples(&samples, rho, n))
}

/// Same as [`cauchy_coefficients`] but with samples already evaluated on the
/// `nodes` equispaced points of the circle.
pub fn coefficients_from_samples(samples: &[Complex64], rho: f64, n: usize) -> Vec<f64> {
    let nodes = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(nodes).process(&mut buf);
    let scale = 1.0 / nodes as f64;
    let mut rho_k = 1.0;
    buf.iter()
        .take(n)
        .map(|c| {
            let v = c.re * scale / rho_k;
            rho_k *= rho;
            v
        })
        .collect()
}

/// Extract with `nodes` and `2 * nodes` samples and certify agreement.
pub fn certified_coefficients<G>(
    mut g: G,
    rho: f64,
    nodes: usize,
    n: usize,
    tol: f64,
) -> Result<Vec<f64>>
where
    G: FnMut(Complex64) -> Result<Complex64>,
{
    if n > nodes {
        return Err(Error::Extraction(format!(
            "{n} coefficients need at least as many nodes (have {nodes})"
        )));
    }
    let fine_samples = circle_samples(&mut g, rho, 2 * nodes)?;
    let coarse_samples: Vec<Complex64> = fine_samples.iter().step_by(2).copied().collect();
    let fine = coefficients_from_samples(&fine_samples, rho, n);
    let coarse = coefficients_from_samples(&coarse_samples, rho, n);
    let worst = fine
        .iter()
        .zip(&coarse)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if worst > tol {
        return Err(Error::Extraction(format!(
            "node doubling changed coefficients by {worst:e} (> {tol:e})"
        )));
    }
    Ok(fine)
}

/// `g` evaluated at `rho * exp(2 pi i j / nodes)`, `j = 0..nodes`.
pub fn circle_samples<G>(mut g: G, rho: f64, nodes: usize) -> Result<Vec<Complex64>>
where
    G: FnMut(Complex64) -> Result<Complex64>,
{
    (0..nodes)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / nodes as f64;
            g(Complex64::from_polar(rho, theta))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_coefficients() {
        // 1/(2 - z) = sum z^k / 2^{k+1}
        let c = cauchy_coefficients(|z| Ok(1.0 / (2.0 - z)), 1.0, 64, 10).unwrap();
        for (k, v) in c.iter().enumerate() {
            assert!((v - 0.5f64.powi(k as i32 + 1)).abs() < 1e-15);
        }
    }

    #[test]
    fn certification_detects_aliasing() {
        // A pole close to the circle aliases badly with few nodes.
        let res = certified_coefficients(|z| Ok(1.0 / (1.01 - z)), 1.0, 16, 8, 1e-9);
        assert!(matches!(res, Err(Error::Extraction(_))));
    }
}
