use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::{smallest_eigenpair, EigenMethod, LanczosOptions};
use super::fields::{build_f_r, build_h, build_w_r, CutoffProfile};
use super::hat::hat_j;
use super::lattice::Lattice;
use crate::error::{Error, Result};
use crate::potentials::{PairPotential, TruncatedPotential};
use crate::scattering::{default_r_max, scattering_length_ode};

/// Soft potential replacing the scatterers: `Ũ_R(t) = R⁻³ j(t/R)`, optionally
/// with the hole `θ(t - R₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UChoice {
    Hat,
    #[default]
    HatWithHole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DysonCheckConfig {
    /// Scatterer positions `y_i` in `[0, L)³`; each must sit on a lattice site.
    pub scatterers: Vec<[f64; 3]>,
    pub r: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub u_choice: UChoice,
}

impl DysonCheckConfig {
    pub fn new(scatterers: Vec<[f64; 3]>, r: f64, epsilon: f64) -> Self {
        DysonCheckConfig { scatterers, r, epsilon, kappa: 0.0, u_choice: UChoice::default() }
    }

    fn validate(&self, box_l: f64, r0: f64) -> Result<()> {
        if !(self.r > r0 && self.r < 0.5 * box_l) {
            return Err(Error::domain(format!("R = {} must lie in (R0 = {r0}, L/2 = {})", self.r, 0.5 * box_l)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::domain(format!("epsilon = {} must lie in (0, 1)", self.epsilon)));
        }
        if !(0.0..1.0).contains(&self.kappa) {
            return Err(Error::domain(format!("kappa = {} must lie in [0, 1)", self.kappa)));
        }
        Ok(())
    }

    pub fn u_r(&self, t: f64, r0: f64) -> f64 {
        if self.u_choice == UChoice::HatWithHole && t <= r0 {
            return 0.0;
        }
        hat_j(t / self.r) / self.r.powi(3)
    }
}

fn torus_distance(a: [f64; 3], b: [f64; 3], box_l: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..3 {
        let d = (a[k] - b[k]).rem_euclid(box_l);
        let d = d.min(box_l - d);
        s += d * d;
    }
    s.sqrt()
}

/// Greedy `min_dist`-separated subset, in two passes: first every point whose
/// nearest other point is at least `min_dist` away, then, in index order, every
/// point at least `min_dist` from all points already taken. Returns indices.
pub fn separated_subset(points: &[[f64; 3]], min_dist: f64, box_l: f64) -> Vec<usize> {
    let isolated =
        |i: usize| points.iter().enumerate().all(|(j, q)| j == i || torus_distance(points[i], *q, box_l) >= min_dist);
    let mut chosen: Vec<usize> = (0..points.len()).filter(|&i| isolated(i)).collect();
    for i in 0..points.len() {
        if chosen.contains(&i) {
            continue;
        }
        if chosen.iter().all(|&j| torus_distance(points[i], points[j], box_l) >= min_dist) {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// `count` distinct points on the sublattice of spacing `L / sublattice`,
/// pairwise at least `min_dist` apart, drawn from a seeded ChaCha stream.
pub fn random_scatterers(
    count: usize,
    box_l: f64,
    sublattice: usize,
    min_dist: f64,
    seed: u64,
) -> Result<Vec<[f64; 3]>> {
    let step = box_l / sublattice as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<[f64; 3]> = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::domain(format!(
                "cannot place {count} points {min_dist} apart on a {sublattice}³ sublattice"
            )));
        }
        let p = [0; 3].map(|_: i32| rng.random_range(0..sublattice) as f64 * step);
        if out.iter().all(|q| torus_distance(p, *q, box_l) >= min_dist.max(1e-12)) {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DysonEigenvalue {
    pub grid_n: usize,
    pub eigenvalue: f64,
    pub residual: f64,
    pub iterations: usize,
    pub method: EigenMethod,
}

/// Scattering length of the truncated potential, as used in the lattice checks.
pub fn truncated_scattering_length(potential: &TruncatedPotential) -> Result<f64> {
    Ok(scattering_length_ode(potential, default_r_max(potential), 16)?.a)
}

fn site_of(lattice: &Lattice, y: [f64; 3]) -> Result<[usize; 3]> {
    let h = lattice.spacing();
    let n = lattice.n() as i64;
    let mut out = [0usize; 3];
    for k in 0..3 {
        let m = y[k] / h;
        if (m - m.round()).abs() > 1e-9 {
            return Err(Error::domain(format!("scatterer {y:?} is not on a lattice site of spacing {h}")));
        }
        out[k] = (m.round() as i64).rem_euclid(n) as usize;
    }
    Ok(out)
}

/// Smallest eigenvalue of
/// `(1-κ) p² χ(p)² + ½ Σ ṽ(d(x,y_i)) - (1-κ)[(1-ε) ã U_R(d(x,y_NN)) - Σ (ã/ε) w_R(x-y_i)]`
/// on the lattice, with `ã` the scattering length of `ṽ` and `y_NN` the
/// nearest point of the `R/5`-separated subset.
pub fn verify_dyson(
    config: &DysonCheckConfig,
    potential: &TruncatedPotential,
    a_tilde: f64,
    cutoff: &CutoffProfile,
    lattice: &Lattice,
    opts: &LanczosOptions,
) -> Result<DysonEigenvalue> {
    let r0 = potential.range();
    config.validate(lattice.box_l(), r0)?;
    if r0 < 2.0 * lattice.spacing() {
        return Err(Error::Resolution(format!(
            "potential range R0 = {r0} spans fewer than 2 cells of size {}",
            lattice.spacing()
        )));
    }
    let sites: Vec<[usize; 3]> = config.scatterers.iter().map(|y| site_of(lattice, *y)).collect::<Result<_>>()?;
    let nn = separated_subset(&config.scatterers, config.r / 5.0, lattice.box_l());
    let h = build_h(lattice, cutoff)?;
    let w_r = build_w_r(&build_f_r(&h, config.r)?);

    let scale = 1.0 - config.kappa;
    let mut potential_term = vec![0.0; lattice.sites()];
    for (x, v) in potential_term.iter_mut().enumerate() {
        let mut nearest = f64::INFINITY;
        for (i, y) in config.scatterers.iter().enumerate() {
            let d = lattice.distance_to(x, *y);
            *v += 0.5 * potential.value(d);
            if nn.contains(&i) {
                nearest = nearest.min(d);
            }
            let s = sites[i];
            let rel = lattice.shifted(x, [-(s[0] as i64), -(s[1] as i64), -(s[2] as i64)]);
            *v += scale * a_tilde / config.epsilon * w_r.values[rel];
        }
        if nearest.is_finite() {
            *v -= scale * (1.0 - config.epsilon) * a_tilde * config.u_r(nearest, r0);
        }
    }
    let kinetic: Vec<f64> = (0..lattice.sites())
        .map(|i| {
            let p = lattice.momentum_norm(i);
            let chi = cutoff.chi(p);
            scale * p * p * chi * chi
        })
        .collect();
    let inv_n = 1.0 / lattice.sites() as f64;
    let apply = |x: &[f64], y: &mut [f64]| {
        let mut buf: Vec<Complex64> = x.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        lattice.fft(&mut buf, true);
        buf.iter_mut().zip(&kinetic).for_each(|(c, k)| *c *= k * inv_n);
        lattice.fft(&mut buf, false);
        for i in 0..x.len() {
            y[i] = buf[i].re + potential_term[i] * x[i];
        }
    };
    let e = smallest_eigenpair(lattice.sites(), apply, opts)?;
    Ok(DysonEigenvalue {
        grid_n: lattice.n(),
        eigenvalue: e.value,
        residual: e.residual,
        iterations: e.iterations,
        method: e.method,
    })
}

/// Eigenvalues on a refinement sequence, and the verdict at the finest grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DysonCertificate {
    pub box_l: f64,
    pub s: f64,
    pub a_tilde: f64,
    pub r0: f64,
    pub runs: Vec<DysonEigenvalue>,
    /// `|λ|` of the kinetic-only operator on the finest grid.
    pub floor: f64,
    /// `|λ(finest) - λ(previous)|`.
    pub trend: f64,
    /// `4 floor + trend`.
    pub tol_disc: f64,
    pub eigenvalue: f64,
    pub holds: bool,
    /// Negative part `max(-λ, 0)` on the coarsest grid over that on the finest;
    /// `None` when the finest grid has no negative part.
    pub shrink_ratio: Option<f64>,
    /// Both negative parts below `4 floor`, or a shrink ratio of at least 2.
    pub shrinks: bool,
}

pub fn certify_dyson(
    config: &DysonCheckConfig,
    potential: &TruncatedPotential,
    cutoff: &CutoffProfile,
    box_l: f64,
    grids: &[usize],
    opts: &LanczosOptions,
) -> Result<DysonCertificate> {
    let finest = *grids.iter().max().ok_or_else(|| Error::domain("no grid sizes given"))?;
    let a_tilde = truncated_scattering_length(potential)?;
    let mut runs = Vec::with_capacity(grids.len());
    for &n in grids {
        let lattice = Lattice::new(box_l, n)?;
        runs.push(verify_dyson(config, potential, a_tilde, cutoff, &lattice, opts)?);
    }
    let empty = DysonCheckConfig { scatterers: Vec::new(), ..config.clone() };
    let floor = verify_dyson(&empty, potential, a_tilde, cutoff, &Lattice::new(box_l, finest)?, opts)?.eigenvalue.abs();
    let last = runs.last().expect("at least one grid").eigenvalue;
    let trend = if runs.len() >= 2 { (last - runs[runs.len() - 2].eigenvalue).abs() } else { 0.0 };
    let tol_disc = 4.0 * floor + trend;
    let neg_first = (-runs[0].eigenvalue).max(0.0);
    let neg_last = (-last).max(0.0);
    let shrink_ratio = (neg_last > 0.0).then(|| neg_first / neg_last);
    let negligible = 4.0 * floor.max(f64::EPSILON);
    Ok(DysonCertificate {
        box_l,
        s: cutoff.s,
        a_tilde,
        r0: potential.range(),
        runs,
        floor,
        trend,
        tol_disc,
        eigenvalue: last,
        holds: last >= -tol_disc,
        shrink_ratio,
        shrinks: (neg_first <= negligible && neg_last <= negligible) || shrink_ratio.is_none_or(|r| r >= 2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{truncate, RadialPotential};

    #[test]
    fn separated_subset_two_passes() {
        let l = 100.0;
        let pts = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [50.0, 0.0, 0.0], [1.5, 0.0, 0.0]];
        // point 2 is isolated; 0 is taken next, 1 and 3 are too close to it
        assert_eq!(separated_subset(&pts, 2.0, l), vec![0, 2]);
        assert_eq!(separated_subset(&pts, 0.1, l), vec![0, 1, 2, 3]);
    }

    #[test]
    fn scatterers_are_seeded_and_separated() {
        let a = random_scatterers(5, 32.0, 8, 1.6, 7).unwrap();
        assert_eq!(a, random_scatterers(5, 32.0, 8, 1.6, 7).unwrap());
        assert_ne!(a, random_scatterers(5, 32.0, 8, 1.6, 8).unwrap());
        for i in 0..5 {
            for j in 0..i {
                assert!(torus_distance(a[i], a[j], 32.0) >= 1.6);
            }
        }
    }

    #[test]
    fn no_scatterers_is_pure_kinetic() {
        let v = truncate(&RadialPotential::hard_core(2.0).unwrap(), 20.0).unwrap();
        let lat = Lattice::new(10.0, 10).unwrap();
        let cfg = DysonCheckConfig::new(Vec::new(), 4.5, 0.3);
        let e =
            verify_dyson(&cfg, &v, 1.0, &CutoffProfile::new(2.0).unwrap(), &lat, &LanczosOptions::default()).unwrap();
        assert_eq!(e.method, EigenMethod::Dense);
        assert!(e.eigenvalue.abs() < 1e-12, "{}", e.eigenvalue);
    }

    #[test]
    fn off_lattice_scatterer_is_rejected() {
        let v = truncate(&RadialPotential::hard_core(3.0).unwrap(), 20.0).unwrap();
        let lat = Lattice::new(16.0, 12).unwrap();
        let cfg = DysonCheckConfig::new(vec![[0.5, 0.0, 0.0]], 6.0, 0.3);
        let r = verify_dyson(&cfg, &v, 1.0, &CutoffProfile::new(4.0).unwrap(), &lat, &LanczosOptions::default());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn inflated_soft_potential_is_detected() {
        let v = truncate(&RadialPotential::hard_core(2.0).unwrap(), 20.0).unwrap();
        let a = truncated_scattering_length(&v).unwrap();
        let lat = Lattice::new(10.0, 10).unwrap();
        let cut = CutoffProfile::new(2.0).unwrap();
        let cfg = DysonCheckConfig::new(vec![[0.0, 0.0, 0.0]], 4.5, 0.3);
        let opts = LanczosOptions::default();
        let honest = verify_dyson(&cfg, &v, a, &cut, &lat, &opts).unwrap().eigenvalue;
        let inflated = verify_dyson(&cfg, &v, 1000.0 * a, &cut, &lat, &opts).unwrap().eigenvalue;
        assert!(honest > -1e-10, "{honest}");
        assert!(inflated < 0.0, "{inflated}");
    }
}
