use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cubic periodic lattice of `n³` sites in a box of side `L`.
///
/// Site `(i, j, k)` sits at `Δ (i, j, k)` with `Δ = L / n`, and momentum index
/// `m` stands for `p = 2π m / L` with `m` taken in `(-n/2, n/2]`.
#[derive(Clone)]
pub struct Lattice {
    box_l: f64,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice").field("box_l", &self.box_l).field("n", &self.n).finish()
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.box_l == other.box_l && self.n == other.n
    }
}

impl Lattice {
    pub fn new(box_l: f64, n: usize) -> Result<Self> {
        if !(box_l > 0.0 && box_l.is_finite()) {
            return Err(Error::domain(format!("box side L = {box_l} must be positive and finite")));
        }
        if n < 2 {
            return Err(Error::Resolution(format!("grid_n = {n} must be at least 2")));
        }
        let mut planner = FftPlanner::new();
        Ok(Lattice { box_l, n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
    }

    pub fn box_l(&self) -> f64 {
        self.box_l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sites(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn spacing(&self) -> f64 {
        self.box_l / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.box_l.powi(3)
    }

    /// Momentum spacing `2π / L`.
    pub fn dp(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.box_l
    }

    /// Largest momentum component on the lattice, `π n / L`.
    pub fn p_max(&self) -> f64 {
        std::f64::consts::PI * self.n as f64 / self.box_l
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn unindex(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Index shifted by `d` with periodic wrap.
    pub fn shifted(&self, idx: usize, d: [i64; 3]) -> usize {
        let n = self.n as i64;
        let [i, j, k] = self.unindex(idx);
        let w = |a: usize, s: i64| (a as i64 + s).rem_euclid(n) as usize;
        self.index(w(i, d[0]), w(j, d[1]), w(k, d[2]))
    }

    /// Signed lattice index in `(-n/2, n/2]`.
    pub fn signed(&self, m: usize) -> i64 {
        let n = self.n as i64;
        let m = m as i64;
        if m <= n / 2 {
            m
        } else {
            m - n
        }
    }

    /// Minimum-image displacement of site `idx` from the origin.
    pub fn displacement(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        self.unindex(idx).map(|a| self.signed(a) as f64 * h)
    }

    /// Torus distance `d(x, 0)` of site `idx`.
    pub fn distance(&self, idx: usize) -> f64 {
        let d = self.displacement(idx);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    /// Torus distance between a site and an arbitrary point.
    pub fn distance_to(&self, idx: usize, y: [f64; 3]) -> f64 {
        let h = self.spacing();
        let l = self.box_l;
        let x = self.unindex(idx);
        let mut s = 0.0;
        for a in 0..3 {
            let mut d = (x[a] as f64 * h - y[a]).rem_euclid(l);
            if d > 0.5 * l {
                d -= l;
            }
            s += d * d;
        }
        s.sqrt()
    }

    /// Momentum vector of mode `idx`.
    pub fn momentum(&self, idx: usize) -> [f64; 3] {
        let dp = self.dp();
        self.unindex(idx).map(|a| self.signed(a) as f64 * dp)
    }

    pub fn momentum_norm(&self, idx: usize) -> f64 {
        let p = self.momentum(idx);
        (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
    }

    /// In-place `Σ_m c_m e^{∓2πi m·j/n}` along all three axes (no normalisation).
    pub fn fft(&self, data: &mut [Complex64], forward: bool) {
        assert_eq!(data.len(), self.sites(), "field size does not match lattice");
        let plan = if forward { &self.forward } else { &self.inverse };
        let n = self.n;
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        let mut line = vec![Complex64::default(); n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    line[j] = data[self.index(i, j, k)];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for j in 0..n {
                    data[self.index(i, j, k)] = line[j];
                }
            }
        }
        for j in 0..n {
            for k in 0..n {
                for i in 0..n {
                    line[i] = data[self.index(i, j, k)];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for i in 0..n {
                    data[self.index(i, j, k)] = line[i];
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Position,
    Momentum,
}

/// Real scalar field on a [`Lattice`].
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicLatticeField {
    pub lattice: Lattice,
    pub space: Space,
    pub values: Vec<f64>,
}

impl PeriodicLatticeField {
    pub fn new(lattice: Lattice, space: Space, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.sites() {
            return Err(Error::domain(format!(
                "field has {} values but the lattice has {} sites",
                values.len(),
                lattice.sites()
            )));
        }
        Ok(PeriodicLatticeField { lattice, space, values })
    }

    pub fn from_fn(lattice: &Lattice, space: Space, f: impl Fn(usize) -> f64) -> Self {
        let values = (0..lattice.sites()).map(f).collect();
        PeriodicLatticeField { lattice: lattice.clone(), space, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `Σ_x values(x) Δ³`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.lattice.cell_volume()
    }

    /// Unnormalised forward transform `Σ_x f(x) e^{-2πi m·x/n}` as complex values.
    pub fn forward(&self) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = self.values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.lattice.fft(&mut data, true);
        data
    }

    /// Forward transform followed by the normalised inverse; returns the worst
    /// relative deviation from the original values.
    pub fn round_trip_error(&self) -> f64 {
        let mut data = self.forward();
        self.lattice.fft(&mut data, false);
        let norm = 1.0 / self.lattice.sites() as f64;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        data.iter().zip(&self.values).map(|(c, v)| (c * norm - v).norm()).fold(0.0, f64::max) / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry() {
        let lat = Lattice::new(8.0, 4).unwrap();
        assert_eq!(lat.spacing(), 2.0);
        assert_eq!(lat.signed(3), -1);
        assert_eq!(lat.signed(2), 2);
        let idx = lat.index(3, 0, 1);
        assert_eq!(lat.unindex(idx), [3, 0, 1]);
        assert_eq!(lat.displacement(idx), [-2.0, 0.0, 2.0]);
        assert_eq!(lat.shifted(idx, [1, -1, 0]), lat.index(0, 3, 1));
        assert!((lat.distance_to(lat.index(0, 0, 0), [7.5, 0.0, 0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fft_of_delta_is_flat_and_round_trips() {
        let lat = Lattice::new(10.0, 6).unwrap();
        let field = PeriodicLatticeField::from_fn(&lat, Space::Position, |i| if i == 0 { 1.0 } else { 0.0 });
        assert!(field.forward().iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-14));
        let noisy = PeriodicLatticeField::from_fn(&lat, Space::Position, |i| ((i * 7919) % 13) as f64 - 6.0);
        assert!(noisy.round_trip_error() < 1e-12);
    }

    #[test]
    fn fft_of_plane_wave_is_a_single_mode() {
        let lat = Lattice::new(1.0, 8).unwrap();
        let field = PeriodicLatticeField::from_fn(&lat, Space::Position, |i| {
            let [a, b, _] = lat.unindex(i);
            (2.0 * std::f64::consts::PI * (a as f64 + 2.0 * b as f64) / 8.0).cos()
        });
        let f = field.forward();
        let peak = lat.index(1, 2, 0);
        let mirror = lat.index(7, 6, 0);
        assert!((f[peak].re - 256.0).abs() < 1e-10);
        assert!((f[mirror].re - 256.0).abs() < 1e-10);
        let rest: f64 = f.iter().enumerate().filter(|(i, _)| *i != peak && *i != mirror).map(|(_, c)| c.norm()).sum();
        assert!(rest < 1e-9);
    }
}
