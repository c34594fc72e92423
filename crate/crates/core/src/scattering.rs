//! Scattering length of a radial potential.
//!
//! The zero-energy equation is `-Δφ + ½ v φ = 0`; for `u(r) = r φ(r)` this is
//! `u'' = ½ v u`, and beyond the range `u` is affine with its zero at `r = a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::potentials::PairPotential;
use crate::quad::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ode,
    Variational,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub r: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringSolution {
    pub a: f64,
    pub method: Method,
    /// `u(r) = r φ(r)`, normalised so that `u'` is 1 at the start of integration
    /// (ODE) or `φ(R) = 1` (variational).
    pub profile: Vec<ProfilePoint>,
    /// Slope `c` of the tail fit `u = c (r - a)`.
    pub tail_slope: f64,
    /// RMS residual of the tail fit relative to `max |u|` on the fit window.
    pub tail_fit_residual: f64,
}

/// Default outer radius of the ODE integration: `5 max(R0, 1)`.
pub fn default_r_max<P: PairPotential + ?Sized>(p: &P) -> f64 {
    5.0 * p.range().max(1.0)
}

const TAIL_FIT_POINTS: usize = 65;

/// Shoots `u'' = ½ v u` outward from `u = 0, u' = 1` (at the origin, or at the
/// hard-core radius) and fits `u = c (r - a)` on `[R0, r_max]` by least squares.
///
/// `samples` sets how many profile points are recorded on `(start, r_max]`.
pub fn scattering_length_ode<P: PairPotential + ?Sized>(
    p: &P,
    r_max: f64,
    samples: usize,
) -> Result<ScatteringSolution> {
    let range = p.range();
    if !(r_max > range) || !r_max.is_finite() {
        return Err(Error::domain(format!("r_max = {r_max} must exceed the range R0 = {range}")));
    }
    if !p.is_nonnegative() {
        return Err(Error::domain("the ODE path needs a non-negative potential"));
    }
    let start = p.hard_core_radius().unwrap_or(0.0);
    let mut stops: Vec<f64> = p.breakpoints().into_iter().filter(|r| *r > start && *r < r_max).collect();
    let n = samples.max(1);
    stops.extend((1..=n).map(|i| start + (r_max - start) * i as f64 / n as f64));
    let fit_start = range.max(start);
    stops.extend(
        (0..TAIL_FIT_POINTS).map(|i| fit_start + (r_max - fit_start) * i as f64 / (TAIL_FIT_POINTS - 1) as f64),
    );
    stops.retain(|r| *r > start);
    stops.sort_by(f64::total_cmp);
    // Sample stops sitting next to a breakpoint would leave slivers too thin to read
    // the potential from the correct side; the breakpoint itself is kept.
    let breaks = p.breakpoints();
    let near = |r: f64| breaks.iter().any(|b| *b != r && (b - r).abs() < 1e-9 * b.abs().max(1.0));
    stops.retain(|r| !near(*r));
    stops.dedup();

    // Pull evaluation points a few ulps toward the piece midpoint so that jumps sitting
    // on a stop are read from the correct side.
    let q = |r: f64, mid: f64| {
        let d = mid - r;
        let pull = (1e-13 * d.abs()).max(8.0 * f64::EPSILON * r.abs().max(1.0)).min(d.abs());
        0.5 * p.value(r + pull.copysign(d))
    };
    let states = Dopri5::default().integrate(q, start, 0.0, 1.0, &stops)?;

    let mut profile = Vec::with_capacity(states.len() + 1);
    profile.push(ProfilePoint { r: start, u: 0.0 });
    profile.extend(states.iter().map(|s| ProfilePoint { r: s.r, u: s.u }));

    let window: Vec<&ProfilePoint> = profile.iter().filter(|pt| pt.r >= fit_start).collect();
    let (slope, intercept, residual) = affine_fit(&window);
    if !(slope > 0.0) {
        return Err(Error::numerical(format!("tail slope {slope} is not positive")));
    }
    Ok(ScatteringSolution {
        a: -intercept / slope,
        method: Method::Ode,
        profile,
        tail_slope: slope,
        tail_fit_residual: residual,
    })
}

/// Least-squares fit `u = c r + d`; returns `(c, d, relative RMS residual)`.
fn affine_fit(points: &[&ProfilePoint]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mean_r = points.iter().map(|p| p.r).sum::<f64>() / n;
    let mean_u = points.iter().map(|p| p.u).sum::<f64>() / n;
    let (mut srr, mut sru) = (0.0, 0.0);
    for p in points {
        let dr = p.r - mean_r;
        srr += dr * dr;
        sru += dr * (p.u - mean_u);
    }
    let c = sru / srr;
    let d = mean_u - c * mean_r;
    let scale = points.iter().map(|p| p.u.abs()).fold(0.0, f64::max);
    let rms = (points.iter().map(|p| (p.u - c * p.r - d).powi(2)).sum::<f64>() / n).sqrt();
    (c, d, if scale > 0.0 { rms / scale } else { 0.0 })
}

/// Minimises `∫_{|x|<=R} |∇φ|² + ½ v φ²` over radial `φ` with `φ(R) = 1`
/// using piecewise-linear elements, then solves `4πa / (1 - a/R) = E_min` for `a`.
///
/// A hard core enters as the Dirichlet condition `φ = 0` at its radius.
pub fn scattering_length_variational<P: PairPotential + ?Sized>(
    p: &P,
    big_r: f64,
    mesh: usize,
) -> Result<ScatteringSolution> {
    if mesh < 16 {
        return Err(Error::domain(format!("mesh = {mesh} must be at least 16")));
    }
    if !(big_r >= p.range()) || !big_r.is_finite() {
        return Err(Error::domain(format!("R = {big_r} must be at least the range R0 = {}", p.range())));
    }
    if !p.is_nonnegative() {
        return Err(Error::domain("the variational principle needs a non-negative potential"));
    }
    let core = p.hard_core_radius();
    let start = core.unwrap_or(0.0);
    if start >= big_r {
        return Err(Error::domain(format!("hard core of radius {start} covers the ball of radius R = {big_r}")));
    }
    let h = (big_r - start) / mesh as f64;
    let nodes: Vec<f64> = (0..=mesh).map(|i| start + h * i as f64).collect();
    let breaks = p.breakpoints();
    let (gx, gw) = gauss_legendre(3);

    // Tridiagonal energy matrix (divided by 4π): diag[i], off[i] couples i and i+1.
    let mut diag = vec![0.0; mesh + 1];
    let mut off = vec![0.0; mesh];
    for e in 0..mesh {
        let (r0, r1) = (nodes[e], nodes[e + 1]);
        let stiff = (r1.powi(3) - r0.powi(3)) / (3.0 * h * h);
        let mut cuts = vec![r0];
        cuts.extend(breaks.iter().copied().filter(|b| *b > r0 && *b < r1));
        cuts.push(r1);
        let (mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0);
        for w in cuts.windows(2) {
            let (c, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (xi, wi) in gx.iter().zip(&gw) {
                let r = c + half * xi;
                let weight = wi * half * 0.5 * p.value(r) * r * r;
                let n1 = (r - r0) / h;
                let n0 = 1.0 - n1;
                m00 += weight * n0 * n0;
                m01 += weight * n0 * n1;
                m11 += weight * n1 * n1;
            }
        }
        diag[e] += stiff + m00;
        diag[e + 1] += stiff + m11;
        off[e] += -stiff + m01;
    }

    // Unknowns are nodes first..mesh-1; node mesh is pinned to 1, node 0 to 0 under a core.
    let first = usize::from(core.is_some());
    let last = mesh;
    let unknowns = last - first;
    let mut sub = Vec::with_capacity(unknowns);
    let mut dia = Vec::with_capacity(unknowns);
    let mut sup = Vec::with_capacity(unknowns);
    let mut rhs = vec![0.0; unknowns];
    for (k, i) in (first..last).enumerate() {
        sub.push(if i > first { off[i - 1] } else { 0.0 });
        dia.push(diag[i]);
        sup.push(if i + 1 < last { off[i] } else { 0.0 });
        if i + 1 == last {
            rhs[k] = -off[i];
        }
    }
    let x = thomas(&sub, &dia, &sup, &rhs)?;
    let mut phi = vec![0.0; mesh + 1];
    phi[first..last].copy_from_slice(&x);
    phi[last] = 1.0;
    let energy = 4.0 * std::f64::consts::PI * (diag[last] + off[last - 1] * phi[last - 1]);
    let a = energy / (4.0 * std::f64::consts::PI + energy / big_r);

    let profile: Vec<ProfilePoint> = nodes.iter().zip(&phi).map(|(r, f)| ProfilePoint { r: *r, u: r * f }).collect();
    // Exact minimiser beyond R0 is (1 - a/r) / (1 - a/R); the slope of u is 1 / (1 - a/R).
    let window: Vec<&ProfilePoint> = profile.iter().filter(|pt| pt.r >= p.range().max(start)).collect();
    let (tail_slope, tail_fit_residual) = if window.len() >= 2 {
        let (c, _, res) = affine_fit(&window);
        (c, res)
    } else {
        (1.0 / (1.0 - a / big_r), 0.0)
    };
    Ok(ScatteringSolution { a, method: Method::Variational, profile, tail_slope, tail_fit_residual })
}

/// Solves a tridiagonal system; `sub[0]` and `sup[n-1]` are ignored.
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    for i in 0..n {
        if i > 0 {
            denom = diag[i] - sub[i] * c[i - 1];
        }
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::numerical("singular tridiagonal system in the variational solve"));
        }
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - if i > 0 { sub[i] * d[i - 1] } else { 0.0 }) / denom;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Closed form for the hard sphere of radius `a` truncated at scale `phi`:
/// `a (1 - sqrt(a / 6φ) tanh sqrt(6φ / a))`.
pub fn hard_sphere_truncated_a(a: f64, phi: f64) -> Result<f64> {
    if !(a > 0.0) || !(phi > 0.0) {
        return Err(Error::domain(format!("need a > 0 and phi > 0, got a = {a}, phi = {phi}")));
    }
    let k = (6.0 * phi / a).sqrt();
    Ok(a * (1.0 - k.tanh() / k))
}

/// Scattering length `R0 (1 - tan λ / λ)` of the attractive well `-2λ²/R0²` on `[0, R0]`.
pub fn attractive_well_a(lambda: f64, r0: f64) -> Result<f64> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&lambda) {
        return Err(Error::domain(format!("lambda = {lambda} must lie in [0, pi/2); the well binds beyond that")));
    }
    if !(r0 > 0.0) {
        return Err(Error::domain(format!("well radius R0 = {r0} must be positive")));
    }
    if lambda < 1e-4 {
        // tan λ / λ = 1 + λ²/3 + 2λ⁴/15 + ...
        let l2 = lambda * lambda;
        return Ok(-r0 * l2 * (1.0 / 3.0 + 2.0 * l2 / 15.0));
    }
    Ok(r0 * (1.0 - lambda.tan() / lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{truncate, RadialPotential};

    // u'' = ½ H u on [0, w]: a = w - tanh(k w) / k with k = sqrt(H/2).
    fn step_oracle(height: f64, width: f64) -> f64 {
        let k = (0.5 * height).sqrt();
        width - (k * width).tanh() / k
    }

    #[test]
    fn hard_core_ode_is_exact() {
        let p = RadialPotential::hard_core(1.0).unwrap();
        let sol = scattering_length_ode(&p, 5.0, 100).unwrap();
        assert!((sol.a - 1.0).abs() < 1e-12);
        assert!(sol.tail_fit_residual < 1e-12);
    }

    #[test]
    fn zero_potential_has_zero_length() {
        let p = RadialPotential::zero();
        assert!(scattering_length_ode(&p, 5.0, 10).unwrap().a.abs() < 1e-12);
        assert!(scattering_length_variational(&p, 3.0, 64).unwrap().a.abs() < 1e-12);
    }

    #[test]
    fn step_ode_matches_half_convention_oracle() {
        let p = RadialPotential::step(60.0, 1.0).unwrap();
        let sol = scattering_length_ode(&p, 5.0, 200).unwrap();
        assert!((sol.a - step_oracle(60.0, 1.0)).abs() < 1e-9, "{}", sol.a);
        assert!(sol.tail_fit_residual < 1e-8);
        assert!(sol.tail_slope > 0.0);
    }

    #[test]
    fn profile_is_monotone_in_phi() {
        let p = RadialPotential::step(60.0, 1.0).unwrap();
        let sol = scattering_length_ode(&p, 5.0, 200).unwrap();
        let phi: Vec<f64> = sol.profile.iter().skip(1).map(|pt| pt.u / pt.r).collect();
        assert!(phi.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn variational_hard_core_converges() {
        let p = RadialPotential::hard_core(1.0).unwrap();
        let coarse = scattering_length_variational(&p, 4.0, 64).unwrap().a;
        let fine = scattering_length_variational(&p, 4.0, 1024).unwrap().a;
        assert!((fine - 1.0).abs() < (coarse - 1.0).abs());
        assert!((fine - 1.0).abs() < 1e-4, "{fine}");
    }

    #[test]
    fn variational_matches_ode_on_step() {
        let p = RadialPotential::step(60.0, 1.0).unwrap();
        let var = scattering_length_variational(&p, 4.0, 4096).unwrap().a;
        assert!((var - step_oracle(60.0, 1.0)).abs() < 1e-5, "{var}");
    }

    #[test]
    fn truncated_hard_core_is_a_step() {
        let hc = RadialPotential::hard_core(1.0).unwrap();
        let t = truncate(&hc, 10.0).unwrap();
        let sol = scattering_length_ode(&t, 5.0, 50).unwrap();
        assert!((sol.a - step_oracle(60.0, 1.0)).abs() < 1e-9);
    }

    #[test]
    fn closed_forms() {
        assert!((hard_sphere_truncated_a(1.0, 10.0).unwrap() - 0.870_900_603_4).abs() < 1e-9);
        assert!((hard_sphere_truncated_a(1.0, 1.0).unwrap() - 0.597_792_994_3).abs() < 1e-9);
        assert!((hard_sphere_truncated_a(1.0, 1e12).unwrap() - 1.0).abs() < 1e-6);
        let pi = std::f64::consts::PI;
        assert!((attractive_well_a(pi / 4.0, 1.0).unwrap() - (1.0 - 4.0 / pi)).abs() < 1e-14);
        assert!((attractive_well_a(1.0, 2.0).unwrap() + 1.114_815_5).abs() < 1e-6);
        assert!(attractive_well_a(1e-9, 1.0).unwrap().abs() < 1e-15);
        assert!(matches!(attractive_well_a(pi / 2.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn bad_inputs() {
        let p = RadialPotential::step(1.0, 2.0).unwrap();
        assert!(matches!(scattering_length_ode(&p, 1.0, 10), Err(Error::Domain(_))));
        assert!(matches!(scattering_length_variational(&p, 4.0, 8), Err(Error::Domain(_))));
        let well = RadialPotential::attractive_well(0.5, 1.0).unwrap();
        assert!(scattering_length_ode(&well, 5.0, 10).is_err());
    }
}
