use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lattice::{Lattice, PeriodicLatticeField, Space};
use crate::error::{Error, Result};

/// Momentum cutoff `χ(p) = ν(s|p|)` with `ν = 0` on `[0, 1]`, `ν = 1` on `[2, ∞)`
/// and the degree-7 smoothstep in between (three continuous derivatives).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub s: f64,
}

impl CutoffProfile {
    pub const SMOOTH_ORDER: usize = 3;

    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::domain(format!("cutoff length s = {s} must be positive and finite")));
        }
        Ok(CutoffProfile { s })
    }

    pub fn nu(t: f64) -> f64 {
        if t <= 1.0 {
            0.0
        } else if t >= 2.0 {
            1.0
        } else {
            let u = t - 1.0;
            u.powi(4) * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)))
        }
    }

    pub fn chi(&self, p: f64) -> f64 {
        Self::nu(self.s * p)
    }
}

/// `h(x) = |Λ|^{-1} Σ_p (1 - χ(p)) e^{-ipx}`.
pub fn build_h(lattice: &Lattice, cutoff: &CutoffProfile) -> Result<PeriodicLatticeField> {
    if lattice.p_max() < 2.0 / cutoff.s {
        return Err(Error::Resolution(format!(
            "lattice momenta reach {} but the cutoff switches on at 2/s = {}",
            lattice.p_max(),
            2.0 / cutoff.s
        )));
    }
    build_h_unchecked(lattice, |p| cutoff.chi(p))
}

/// `h` for an arbitrary radial cutoff, without the resolution check.
pub fn build_h_unchecked(lattice: &Lattice, chi: impl Fn(f64) -> f64) -> Result<PeriodicLatticeField> {
    let mut data: Vec<_> = (0..lattice.sites())
        .map(|i| rustfft::num_complex::Complex64::new(1.0 - chi(lattice.momentum_norm(i)), 0.0))
        .collect();
    lattice.fft(&mut data, true);
    let inv_vol = 1.0 / lattice.volume();
    let scale = data.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let imag = data.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    if imag > 1e-12 * scale.max(1.0) {
        return Err(Error::numerical(format!("h has an imaginary part {imag:e}; cutoff is not symmetric")));
    }
    let values = data.iter().map(|c| c.re * inv_vol).collect();
    PeriodicLatticeField::new(lattice.clone(), Space::Position, values)
}

/// Lattice offsets `y` with `|y| <= r`.
pub fn ball_offsets(lattice: &Lattice, r: f64) -> Vec<[i64; 3]> {
    let h = lattice.spacing();
    let m = (r / h).floor() as i64;
    let mut out = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            for c in -m..=m {
                let d2 = ((a * a + b * b + c * c) as f64) * h * h;
                if d2 <= r * r * (1.0 + 1e-12) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// `f_R(x) = max_{|y| <= R} |h(x - y) - h(x)|` over lattice offsets.
pub fn build_f_r(h: &PeriodicLatticeField, r: f64) -> Result<PeriodicLatticeField> {
    let lattice = &h.lattice;
    if r < 4.0 * lattice.spacing() {
        return Err(Error::Resolution(format!(
            "R = {r} spans fewer than 4 lattice cells of size {}",
            lattice.spacing()
        )));
    }
    if r >= 0.5 * lattice.box_l() {
        return Err(Error::domain(format!("R = {r} must be below half the box side {}", lattice.box_l())));
    }
    let offsets = ball_offsets(lattice, r);
    let values: Vec<f64> = (0..lattice.sites())
        .into_par_iter()
        .map(|x| {
            let hx = h.values[x];
            offsets.iter().map(|d| (h.values[lattice.shifted(x, [-d[0], -d[1], -d[2]])] - hx).abs()).fold(0.0, f64::max)
        })
        .collect();
    PeriodicLatticeField::new(lattice.clone(), Space::Position, values)
}

/// `w_R(x) = (2/π²) f_R(x) ∫_Λ f_R`.
pub fn build_w_r(f_r: &PeriodicLatticeField) -> PeriodicLatticeField {
    let factor = 2.0 / (std::f64::consts::PI.powi(2)) * f_r.integral();
    PeriodicLatticeField {
        lattice: f_r.lattice.clone(),
        space: Space::Position,
        values: f_r.values.iter().map(|v| v * factor).collect(),
    }
}

/// C^∞ bump supported in the ball of radius `1/2`.
fn bump(r: f64) -> f64 {
    let t = 2.0 * r;
    if t >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// `η_b(x) = η(x/b)` where `η` is the self-convolution of a smooth bump of radius
/// `1/2`, normalised to `η(0) = 1`. Returns the field and `min η̂ / max η̂`.
pub fn build_eta(b: f64, lattice: &Lattice) -> Result<(PeriodicLatticeField, f64)> {
    if !(b > 0.0) || b > 0.5 * lattice.box_l() {
        return Err(Error::domain(format!("eta width b = {b} must lie in (0, L/2 = {}]", 0.5 * lattice.box_l())));
    }
    if 0.5 * b < 2.0 * lattice.spacing() {
        return Err(Error::Resolution(format!("eta width b = {b} is below 4 lattice cells")));
    }
    let base = PeriodicLatticeField::from_fn(lattice, Space::Position, |i| bump(lattice.distance(i) / b));
    let mut spectrum = base.forward();
    for c in spectrum.iter_mut() {
        *c = rustfft::num_complex::Complex64::new(c.norm_sqr(), 0.0);
    }
    let hat_max = spectrum.iter().fold(0.0f64, |m, c| m.max(c.re));
    let hat_min = spectrum.iter().fold(f64::INFINITY, |m, c| m.min(c.re));
    lattice.fft(&mut spectrum, false);
    let at_zero = spectrum[0].re;
    let values = spectrum.iter().map(|c| c.re / at_zero).collect();
    Ok((PeriodicLatticeField::new(lattice.clone(), Space::Position, values)?, hat_min / hat_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_shape() {
        assert_eq!(CutoffProfile::nu(1.0), 0.0);
        assert_eq!(CutoffProfile::nu(2.0), 1.0);
        assert!((CutoffProfile::nu(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 0..=1000 {
            let v = CutoffProfile::nu(1.0 + i as f64 / 1000.0);
            assert!((0.0..=1.0).contains(&v) && v >= prev);
            prev = v;
        }
    }

    #[test]
    fn h_without_cutoff_is_a_delta() {
        let lat = Lattice::new(4.0, 8).unwrap();
        let h = build_h_unchecked(&lat, |_| 0.0).unwrap();
        assert!((h.values[0] - 512.0 / 64.0).abs() < 1e-12);
        assert!(h.values[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn h_with_full_cutoff_is_constant() {
        let lat = Lattice::new(8.0, 16).unwrap();
        let h = build_h_unchecked(&lat, |p| if p == 0.0 { 0.0 } else { 1.0 }).unwrap();
        assert!(h.values.iter().all(|v| (v - 1.0 / 512.0).abs() < 1e-15));
        let f = build_f_r(&h, 2.0).unwrap();
        assert!(f.max_abs() < 1e-15);
        assert!(build_w_r(&f).max_abs() < 1e-15);
    }

    #[test]
    fn f_r_needs_resolution() {
        let lat = Lattice::new(8.0, 8).unwrap();
        let h = build_h(&lat, &CutoffProfile::new(2.0).unwrap()).unwrap();
        assert!(matches!(build_f_r(&h, 2.0), Err(Error::Resolution(_))));
        assert!(matches!(build_h(&lat, &CutoffProfile::new(0.1).unwrap()), Err(Error::Resolution(_))));
    }

    #[test]
    fn eta_properties() {
        let lat = Lattice::new(16.0, 32).unwrap();
        let (eta, ratio) = build_eta(4.0, &lat).unwrap();
        assert!((eta.values[0] - 1.0).abs() < 1e-10);
        assert!(ratio >= -1e-12, "{ratio}");
        for (i, v) in eta.values.iter().enumerate() {
            if lat.distance(i) >= 4.0 {
                assert!(v.abs() < 1e-12);
            }
            assert!(*v <= 1.0 + 1e-12);
        }
        assert!(build_eta(9.0, &lat).is_err());
        assert!(eta.round_trip_error() < 1e-12);
    }
}
