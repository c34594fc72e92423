use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lattice::Lattice;
use crate::error::{Error, Result};

/// Momentum profile `o(q) = Π_i b(q_i)` supported in the cube `|q_i| <= 2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProductBump {
    /// `b(t) = exp(1 - 4 / (4 - t²))`, smooth with `b(0) = 1`.
    #[default]
    Smooth,
    /// `b(t) = (1 - t²/4)^power`, with `power - 1` continuous derivatives.
    Polynomial { power: u32 },
}

/// Truncated Taylor series product.
fn series_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
}

impl ProductBump {
    fn factor(&self, t: f64) -> f64 {
        if t.abs() >= 2.0 {
            return 0.0;
        }
        match self {
            ProductBump::Smooth => (1.0 - 4.0 / (4.0 - t * t)).exp(),
            ProductBump::Polynomial { power } => (1.0 - 0.25 * t * t).powi(*power as i32),
        }
    }

    pub fn value(&self, q: [f64; 3]) -> f64 {
        q.iter().map(|t| self.factor(*t)).product()
    }

    /// Derivatives `b^{(k)}(t)` for `k = 0..=order`, from exact Taylor series.
    pub fn derivatives(&self, t: f64, order: usize) -> Vec<f64> {
        let len = order + 1;
        if t.abs() >= 2.0 {
            return vec![0.0; len];
        }
        // 1 - (t + h)²/4 as a series in h
        let mut base = vec![0.0; len];
        base[0] = 1.0 - 0.25 * t * t;
        if len > 1 {
            base[1] = -0.5 * t;
        }
        if len > 2 {
            base[2] = -0.25;
        }
        let coeffs = match self {
            ProductBump::Polynomial { power } => {
                let mut out = vec![0.0; len];
                out[0] = 1.0;
                for _ in 0..*power {
                    out = series_mul(&out, &base);
                }
                out
            }
            ProductBump::Smooth => {
                // g = 1 - 1/base, then exp(g) by the recursion k e_k = Σ j g_j e_{k-j}
                let mut inv = vec![0.0; len];
                inv[0] = 1.0 / base[0];
                for k in 1..len {
                    let s: f64 = (1..=k).map(|j| base[j] * inv[k - j]).sum();
                    inv[k] = -s / base[0];
                }
                let mut g: Vec<f64> = inv.iter().map(|v| -v).collect();
                g[0] += 1.0;
                let mut e = vec![0.0; len];
                e[0] = g[0].exp();
                for k in 1..len {
                    e[k] = (1..=k).map(|j| j as f64 * g[j] * e[k - j]).sum::<f64>() / k as f64;
                }
                e
            }
        };
        coeffs.iter().enumerate().map(|(k, c)| c * factorial(k as u32)).collect()
    }

    /// `sup |(-Δ)^n o|`, sampled on a grid of `points` nodes per axis that
    /// contains the origin and the cube faces.
    pub fn laplacian_power_sup(&self, n: u32, points: usize) -> Result<f64> {
        if let ProductBump::Polynomial { power } = self {
            if 2 * n + 2 > 2 * power {
                return Err(Error::domain(format!("(-Δ)^{n} needs more smoothness than power {power}")));
            }
        }
        let m = points.max(3) | 1;
        let grid: Vec<f64> = (0..m).map(|i| -2.0 + 4.0 * i as f64 / (m - 1) as f64).collect();
        let jets: Vec<Vec<f64>> = grid.iter().map(|t| self.derivatives(*t, 2 * n as usize)).collect();
        let mut terms = Vec::new();
        for a in 0..=n {
            for b in 0..=n - a {
                let c = n - a - b;
                let coeff = factorial(n) / (factorial(a) * factorial(b) * factorial(c));
                terms.push((coeff, 2 * a as usize, 2 * b as usize, 2 * c as usize));
            }
        }
        let sup = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut sup = 0.0f64;
                for j in 0..m {
                    for k in 0..m {
                        let v: f64 = terms.iter().map(|(w, a, b, c)| w * jets[i][*a] * jets[j][*b] * jets[k][*c]).sum();
                        sup = sup.max(v.abs());
                    }
                }
                sup
            })
            .reduce(|| 0.0, f64::max);
        Ok(sup)
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub n: u32,
    pub s: f64,
    pub box_l: f64,
    pub grid_n: usize,
    pub laplacian_sup: f64,
    /// Sites with `d(x, 0) > s` that were compared.
    pub sites_checked: usize,
    /// `|u(x)| <= (s / (16 d))^{2n} ||(-Δ)^n o||_∞ (2/(πs) + 2(n+1)/L)³` at every site.
    pub holds: bool,
    /// `min_x (rhs - |u|) / rhs`.
    pub min_margin: f64,
    /// Same margin for the bound that follows from the exact lattice identity
    /// `|u(x)| (16 d²)^n <= |Λ|^{-1} Σ_p |(L² (-Δ_d))^n o(s·)(p)|`.
    pub identity_margin: f64,
    /// Log-log slope of the shell maxima of `|u|` against distance on `[s, L/4]`.
    pub slope: f64,
}

/// Evaluates `u(x) = |Λ|^{-1} Σ_p o(sp) e^{-ipx}` on the lattice and compares it
/// with the decay bound at every site farther than `s` from the origin.
pub fn decay_bound_check(o: &ProductBump, s: f64, lattice: &Lattice, n: u32) -> Result<DecayReport> {
    if !(s > 0.0) {
        return Err(Error::domain(format!("s = {s} must be positive")));
    }
    if n > 3 {
        return Err(Error::domain(format!("n = {n} must lie in 0..=3")));
    }
    let dp = lattice.dp();
    let modes = (2.0 / (s * dp)).floor();
    if lattice.p_max() < 2.0 / s || modes < 2.0 {
        return Err(Error::Resolution(format!(
            "profile support |p_i| <= 2/s = {} holds only {modes} lattice momenta per half-axis",
            2.0 / s
        )));
    }
    let box_l = lattice.box_l();
    let vol = lattice.volume();
    let mut data: Vec<Complex64> = (0..lattice.sites())
        .map(|i| {
            let p = lattice.momentum(i);
            Complex64::new(o.value([s * p[0], s * p[1], s * p[2]]), 0.0)
        })
        .collect();
    let profile: Vec<f64> = data.iter().map(|c| c.re).collect();
    lattice.fft(&mut data, true);
    let u: Vec<f64> = data.iter().map(|c| c.re / vol).collect();

    let sup = o.laplacian_power_sup(n, 321)?;
    let volume_factor = (2.0 / (std::f64::consts::PI * s) + 2.0 * (n as f64 + 1.0) / box_l).powi(3);

    // |Λ|^{-1} Σ_p |(L² (-Δ_d))^n o(s·)(p)| with the 6-neighbour lattice Laplacian.
    let mut lap = profile;
    for _ in 0..n {
        let mut next = vec![0.0; lap.len()];
        for (idx, out) in next.iter_mut().enumerate() {
            let mut acc = 6.0 * lap[idx];
            for axis in 0..3 {
                let mut d = [0i64; 3];
                d[axis] = 1;
                acc -= lap[lattice.shifted(idx, d)];
                d[axis] = -1;
                acc -= lap[lattice.shifted(idx, d)];
            }
            *out = box_l * box_l * acc;
        }
        lap = next;
    }
    let identity_sum: f64 = lap.iter().map(|v| v.abs()).sum::<f64>() / vol;

    let mut holds = true;
    let mut min_margin = f64::INFINITY;
    let mut identity_margin = f64::INFINITY;
    let mut checked = 0;
    let shell_width = lattice.spacing();
    let shells = ((0.25 * box_l - s) / shell_width).floor().max(0.0) as usize + 1;
    let mut shell_max = vec![0.0f64; shells];
    for (idx, value) in u.iter().enumerate() {
        let d = lattice.distance(idx);
        if d <= s {
            continue;
        }
        checked += 1;
        let rhs = (s / (16.0 * d)).powi(2 * n as i32) * sup * volume_factor;
        let margin = (rhs - value.abs()) / rhs;
        if margin < 0.0 {
            holds = false;
        }
        min_margin = min_margin.min(margin);
        let rhs_identity = identity_sum / (16.0 * d * d).powi(n as i32);
        identity_margin = identity_margin.min((rhs_identity - value.abs()) / rhs_identity);
        if d <= 0.25 * box_l {
            let shell = ((d - s) / shell_width) as usize;
            if shell < shells {
                shell_max[shell] = shell_max[shell].max(value.abs());
            }
        }
    }
    if checked == 0 {
        return Err(Error::domain(format!("no lattice site lies farther than s = {s} from the origin")));
    }
    let pts: Vec<(f64, f64)> = shell_max
        .iter()
        .enumerate()
        .filter(|(_, m)| **m > 0.0)
        .map(|(k, m)| ((s + (k as f64 + 0.5) * shell_width).ln(), m.ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    Ok(DecayReport {
        n,
        s,
        box_l,
        grid_n: lattice.n(),
        laplacian_sup: sup,
        sites_checked: checked,
        holds,
        min_margin,
        identity_margin,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_sup_at_low_order() {
        let o = ProductBump::Polynomial { power: 8 };
        assert!((o.laplacian_power_sup(0, 41).unwrap() - 1.0).abs() < 1e-15);
        // -Δ o at 0 is -3 b''(0) = 3k/2
        assert!((o.laplacian_power_sup(1, 41).unwrap() - 12.0).abs() < 1e-12);
        assert!(o.laplacian_power_sup(8, 41).is_err());
        // smooth bump: b''(0) = -1/2
        let s = ProductBump::Smooth;
        assert!((s.laplacian_power_sup(0, 41).unwrap() - 1.0).abs() < 1e-15);
        assert!(s.laplacian_power_sup(1, 41).unwrap() >= 1.5 - 1e-12);
    }

    #[test]
    fn jets_match_finite_differences() {
        for o in [ProductBump::Smooth, ProductBump::Polynomial { power: 8 }] {
            for t in [-1.7, -0.3, 0.0, 0.9, 1.5] {
                let d = o.derivatives(t, 3);
                let h = 1e-4;
                let f = |x: f64| o.derivatives(x, 0)[0];
                assert!((d[0] - f(t)).abs() < 1e-15);
                let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
                let d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
                assert!((d[1] - d1).abs() < 1e-6 * (1.0 + d1.abs()), "{o:?} {t}");
                assert!((d[2] - d2).abs() < 1e-4 * (1.0 + d2.abs()), "{o:?} {t}");
            }
        }
    }

    #[test]
    fn order_zero_is_the_triangle_inequality() {
        let lat = Lattice::new(64.0, 64).unwrap();
        let r = decay_bound_check(&ProductBump::default(), 4.0, &lat, 0).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.identity_margin >= 0.0);
    }

    #[test]
    fn unresolved_profile_is_rejected() {
        let lat = Lattice::new(8.0, 8).unwrap();
        assert!(matches!(decay_bound_check(&ProductBump::default(), 4.0, &lat, 1), Err(Error::Resolution(_))));
    }
}
