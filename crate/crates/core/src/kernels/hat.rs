use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre_integral, Quadrature};

/// Overlap profile of two unit-diameter balls, `j(t) = 12 (t + 2) [1 - t]_+²`.
pub fn hat_j(t: f64) -> f64 {
    let gap = (1.0 - t).max(0.0);
    12.0 * (t + 2.0) * gap * gap
}

/// `∫_0^1 t² j(t) dt`, which is 1. The integrand is a quintic, so four Gauss
/// points are exact.
pub fn hat_moment() -> f64 {
    gauss_legendre_integral(|t| t * t * hat_j(t), 0.0, 1.0, 4)
}

/// `(144/π) ∫ dy θ(1/2 - |y|) θ(1/2 - |y - e t|)`, evaluated as the lens volume
/// `∫ π min(1/4 - z², 1/4 - (z - t)²)_+ dz` by adaptive quadrature.
pub fn hat_geometric(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("distance t = {t} must be >= 0")));
    }
    if t >= 1.0 {
        return Ok(0.0);
    }
    let area = |z: f64| {
        let r1 = 0.25 - z * z;
        let r2 = 0.25 - (z - t) * (z - t);
        std::f64::consts::PI * r1.min(r2).max(0.0)
    };
    let q = Quadrature::with_tolerances(1e-15, 1e-13);
    let v = q.integrate_pieces(area, &[t - 0.5, 0.5 * t, 0.5])?.value;
    Ok(144.0 / std::f64::consts::PI * v)
}

/// A smooth radial profile with its first three derivatives.
pub trait RadialFunction: Sync {
    /// `[g, g', g'', g''']` at `r`.
    fn derivatives(&self, r: f64) -> [f64; 4];

    /// Checks that the derivatives are trustworthy near the given points.
    fn validate(&self, _points: &[f64]) -> Result<()> {
        Ok(())
    }
}

/// `g(t) = e^{-t²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian;

impl RadialFunction for Gaussian {
    fn derivatives(&self, r: f64) -> [f64; 4] {
        let e = (-r * r).exp();
        [e, -2.0 * r * e, (4.0 * r * r - 2.0) * e, (12.0 * r - 8.0 * r.powi(3)) * e]
    }
}

/// Derivatives of a plain function by central differences, with a Richardson
/// comparison between steps `h` and `h/2` as the noise check.
pub struct FiniteDifference<F> {
    pub f: F,
    pub h: f64,
    pub tol: f64,
}

impl<F: Fn(f64) -> f64 + Sync> FiniteDifference<F> {
    fn raw(&self, r: f64, h: f64) -> [f64; 4] {
        let f = &self.f;
        let (m2, m1, z, p1, p2) = (f(r - 2.0 * h), f(r - h), f(r), f(r + h), f(r + 2.0 * h));
        [z, (p1 - m1) / (2.0 * h), (p1 - 2.0 * z + m1) / (h * h), (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h.powi(3))]
    }
}

impl<F: Fn(f64) -> f64 + Sync> RadialFunction for FiniteDifference<F> {
    fn derivatives(&self, r: f64) -> [f64; 4] {
        self.raw(r, self.h)
    }

    fn validate(&self, points: &[f64]) -> Result<()> {
        for &r in points {
            let coarse = self.raw(r, self.h);
            let fine = self.raw(r, 0.5 * self.h);
            for k in 2..4 {
                let diff = (coarse[k] - fine[k]).abs();
                if diff > self.tol * (1.0 + fine[k].abs()) {
                    return Err(Error::numerical(format!(
                        "derivative {k} at r = {r} is noisy: steps h and h/2 differ by {diff:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `m(r) = r (g''(r) - r g'''(r)) / 72`.
pub fn ball_weight<G: RadialFunction + ?Sized>(g: &G, r: f64) -> f64 {
    let d = g.derivatives(r);
    r * (d[2] - r * d[3]) / 72.0
}

fn tail_quadrature() -> Quadrature {
    Quadrature { abs_tol: 1e-14, rel_tol: 1e-12, max_segments: 20_000 }
}

/// `∫_0^∞ m(r) j(t/r) dr`; only `r > t` contributes.
pub fn reconstruct<G: RadialFunction + ?Sized>(g: &G, t: f64) -> Result<f64> {
    let q = tail_quadrature();
    Ok(q.integrate_to_infinity(|r| if r <= t { 0.0 } else { ball_weight(g, r) * hat_j(t / r) }, t)?.value)
}

/// `∫_{lo}^∞ r⁶ |m(r)| dr`.
pub fn rapid_decay_tail<G: RadialFunction + ?Sized>(g: &G, lo: f64) -> Result<f64> {
    Ok(tail_quadrature().integrate_to_infinity(|r| r.powi(6) * ball_weight(g, r).abs(), lo)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub t: f64,
    pub g: f64,
    pub reconstruction: f64,
    /// `j(t) ∫_0^1 |m| + ∫_1^∞ |m(r)| j(t/r) dr`.
    pub split_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallDecomposition {
    pub r: Vec<f64>,
    pub m: Vec<f64>,
    pub probes: Vec<Probe>,
}

impl BallDecomposition {
    pub fn max_reconstruction_error(&self) -> f64 {
        self.probes.iter().map(|p| (p.g - p.reconstruction).abs()).fold(0.0, f64::max)
    }
}

/// Samples `m` on `points` log-spaced radii in `[r_min, r_max]` and checks the
/// reconstruction and the split bound at each probe `t`.
pub fn ball_decomposition<G: RadialFunction + ?Sized>(
    g: &G,
    r_min: f64,
    r_max: f64,
    points: usize,
    probes: &[f64],
) -> Result<BallDecomposition> {
    if !(r_min > 0.0 && r_max > r_min) || points < 2 {
        return Err(Error::domain("need 0 < r_min < r_max and at least two samples"));
    }
    let ratio = (r_max / r_min).ln() / (points - 1) as f64;
    let r: Vec<f64> = (0..points).map(|i| r_min * (ratio * i as f64).exp()).collect();
    g.validate(&r)?;
    g.validate(probes)?;
    let m = r.iter().map(|x| ball_weight(g, *x)).collect();
    let q = tail_quadrature();
    let inner = q.integrate(|x| ball_weight(g, x).abs(), 0.0, 1.0)?.value;
    let mut out = Vec::with_capacity(probes.len());
    for &t in probes {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("probe t = {t} must be >= 0")));
        }
        let outer = q
            .integrate_to_infinity(|x| if x <= t { 0.0 } else { ball_weight(g, x).abs() * hat_j(t / x) }, t.max(1.0))?
            .value;
        out.push(Probe {
            t,
            g: g.derivatives(t)[0],
            reconstruction: reconstruct(g, t)?,
            split_bound: hat_j(t) * inner + outer,
        });
    }
    Ok(BallDecomposition { r, m, probes: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_values() {
        assert_eq!(hat_j(0.0), 24.0);
        assert_eq!(hat_j(1.0), 0.0);
        assert!((hat_j(0.1) - 20.412).abs() < 1e-12);
        assert_eq!(hat_j(3.0), 0.0);
        assert!((hat_moment() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn geometric_matches_polynomial() {
        for t in [0.0, 0.3, 0.9] {
            assert!((hat_geometric(t).unwrap() - hat_j(t)).abs() < 1e-10, "t = {t}");
        }
        assert_eq!(hat_geometric(1.5).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_reconstruction() {
        let d = ball_decomposition(&Gaussian, 1e-3, 10.0, 50, &[0.1, 0.5, 1.0, 2.0, 4.0]).unwrap();
        assert!(d.max_reconstruction_error() < 1e-8, "{}", d.max_reconstruction_error());
        for p in &d.probes {
            assert!(p.g <= p.split_bound + 1e-12);
        }
    }

    #[test]
    fn finite_differences_flag_noise() {
        let smooth = FiniteDifference { f: |r: f64| (-r * r).exp(), h: 1e-3, tol: 1e-3 };
        assert!(smooth.validate(&[0.5, 1.0]).is_ok());
        let noisy = FiniteDifference { f: |r: f64| (-r * r).exp() + 1e-9 * (1e7 * r).sin(), h: 1e-3, tol: 1e-3 };
        assert!(matches!(noisy.validate(&[0.5]), Err(Error::Numerical(_))));
    }
}
