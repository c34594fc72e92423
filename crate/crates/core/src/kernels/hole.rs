use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

/// Radial P1 discretisation of the form
/// `∫_0^{R/10} φ'² r² - (λ/R₀)² ∫_0^{R₀} φ² r² + c ∫_0^{R/10} φ² r²`
/// with `c = 3R₀ / ((R/10)³ - R₀³) (tan λ / λ - 1)`, free at `R/10`.
struct RadialForm {
    nodes: Vec<f64>,
    /// Tridiagonal stiffness plus potential: diagonal and off-diagonal.
    kd: Vec<f64>,
    ko: Vec<f64>,
    md: Vec<f64>,
    mo: Vec<f64>,
}

/// `c` in the hole-lemma bound.
pub fn hole_constant(r0: f64, r: f64, lambda: f64) -> f64 {
    let outer = 0.1 * r;
    let ratio = if lambda < 1e-4 { lambda * lambda / 3.0 } else { lambda.tan() / lambda - 1.0 };
    3.0 * r0 / (outer.powi(3) - r0.powi(3)) * ratio
}

impl RadialForm {
    fn new(r0: f64, r: f64, lambda: f64, mesh: usize) -> Self {
        let outer = 0.1 * r;
        let inner = ((mesh as f64 * r0 / outer).round() as usize).clamp(8, mesh - 8);
        let mut nodes: Vec<f64> = (0..=inner).map(|i| r0 * i as f64 / inner as f64).collect();
        let rest = mesh - inner;
        nodes.extend((1..=rest).map(|i| r0 + (outer - r0) * i as f64 / rest as f64));
        nodes[mesh] = outer;
        let c = hole_constant(r0, r, lambda);
        let well = (lambda / r0).powi(2);
        let n = nodes.len();
        let (mut kd, mut ko, mut md, mut mo) = (vec![0.0; n], vec![0.0; n - 1], vec![0.0; n], vec![0.0; n - 1]);
        let (gx, gw) = gauss_legendre(3);
        for e in 0..n - 1 {
            let (a, b) = (nodes[e], nodes[e + 1]);
            let h = b - a;
            let stiff = (b.powi(3) - a.powi(3)) / (3.0 * h * h);
            // element mass matrix for ∫ N_i N_j r², exact for the quartic integrand
            let (mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0);
            for (x, w) in gx.iter().zip(&gw) {
                let t = 0.5 * (x + 1.0);
                let rr = a + h * t;
                let wt = 0.5 * w * h * rr * rr;
                m00 += wt * (1.0 - t) * (1.0 - t);
                m01 += wt * (1.0 - t) * t;
                m11 += wt * t * t;
            }
            let pot = if b <= r0 * (1.0 + 1e-12) { c - well } else { c };
            kd[e] += stiff + pot * m00;
            kd[e + 1] += stiff + pot * m11;
            ko[e] += -stiff + pot * m01;
            md[e] += m00;
            md[e + 1] += m11;
            mo[e] += m01;
        }
        RadialForm { nodes, kd, ko, md, mo }
    }

    /// Number of negative pivots of `K - σ M`, which equals the number of
    /// generalised eigenvalues below `σ`.
    fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut d_prev = 1.0;
        for i in 0..self.kd.len() {
            let a = self.kd[i] - sigma * self.md[i];
            let d = if i == 0 {
                a
            } else {
                let b = self.ko[i - 1] - sigma * self.mo[i - 1];
                a - b * b / d_prev
            };
            let d = if d == 0.0 { -1e-300 } else { d };
            if d < 0.0 {
                count += 1;
            }
            d_prev = d;
        }
        count
    }

    fn smallest(&self) -> f64 {
        let n = self.kd.len();
        let gersh = (0..n)
            .map(|i| {
                let off =
                    if i > 0 { self.ko[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.ko[i].abs() } else { 0.0 };
                (self.kd[i].abs() + off) / self.md[i]
            })
            .fold(0.0, f64::max);
        // constant vector gives an upper bound
        let num: f64 = self.kd.iter().sum::<f64>() + 2.0 * self.ko.iter().sum::<f64>();
        let den: f64 = self.md.iter().sum::<f64>() + 2.0 * self.mo.iter().sum::<f64>();
        let mut hi = num / den;
        let mut lo = -gersh.max(1.0);
        while self.count_below(lo) > 0 {
            lo *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > 0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi.abs().max(lo.abs()).max(1e-300) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for `sigma` by inverse iteration with a tridiagonal solve.
    fn vector(&self, sigma: f64) -> Vec<f64> {
        let n = self.kd.len();
        let shift = sigma - 1e-8 * sigma.abs().max(1e-8);
        let mut x = vec![1.0; n];
        for _ in 0..6 {
            let mut rhs = vec![0.0; n];
            for i in 0..n {
                rhs[i] = self.md[i] * x[i];
                if i > 0 {
                    rhs[i] += self.mo[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    rhs[i] += self.mo[i] * x[i + 1];
                }
            }
            let diag: Vec<f64> = (0..n).map(|i| self.kd[i] - shift * self.md[i]).collect();
            let off: Vec<f64> = (0..n - 1).map(|i| self.ko[i] - shift * self.mo[i]).collect();
            x = thomas(&off, &diag, &off, &rhs);
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            x.iter_mut().for_each(|v| *v /= scale);
        }
        x
    }

    /// `∫_{[lo,hi]} φ² r²` for the P1 interpolant of `x`.
    fn mass_between(&self, x: &[f64], lo: f64, hi: f64) -> f64 {
        let mut s = 0.0;
        for e in 0..self.nodes.len() - 1 {
            let (a, b) = (self.nodes[e], self.nodes[e + 1]);
            let mid = 0.5 * (a + b);
            if mid < lo || mid > hi {
                continue;
            }
            s += self.md_element(e, x);
        }
        s
    }

    fn md_element(&self, e: usize, x: &[f64]) -> f64 {
        let (a, b) = (self.nodes[e], self.nodes[e + 1]);
        let h = b - a;
        let (gx, gw) = gauss_legendre(3);
        gx.iter()
            .zip(&gw)
            .map(|(t, w)| {
                let t = 0.5 * (t + 1.0);
                let r = a + h * t;
                let phi = x[e] * (1.0 - t) + x[e + 1] * t;
                0.5 * w * h * r * r * phi * phi
            })
            .sum()
    }
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = if n > 1 { upper[0] / diag[0] } else { 0.0 };
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = upper[i] / m;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleLemmaReport {
    pub lambda: f64,
    pub r0: f64,
    pub r: f64,
    pub mesh: usize,
    /// `c` in the bound.
    pub bound_constant: f64,
    /// Smallest eigenvalue of (form + c) relative to `∫ φ² r²`.
    pub eigenvalue: f64,
    /// Same on the mesh with half as many elements.
    pub eigenvalue_coarse: f64,
    /// Eigenvalue at `λ = 0`, exactly zero in the continuum.
    pub floor: f64,
    /// `4 |floor| + |eigenvalue - eigenvalue_coarse|`.
    pub tol_disc: f64,
    pub holds: bool,
    /// Fraction of `∫ φ² r²` inside the well over the volume fraction `(10 R₀/R)³`.
    pub concentration: f64,
}

/// Smallest eigenvalue of the radial hole-lemma form on `mesh` elements.
pub fn hole_eigenvalue(r0: f64, r: f64, lambda: f64, mesh: usize) -> Result<f64> {
    check(r0, r, lambda, mesh / 2)?;
    Ok(RadialForm::new(r0, r, lambda, mesh).smallest())
}

fn check(r0: f64, r: f64, lambda: f64, mesh: usize) -> Result<()> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&lambda) {
        return Err(Error::domain(format!("lambda = {lambda} must lie in [0, π/2)")));
    }
    if !(r0 > 0.0 && r0 < 0.1 * r) {
        return Err(Error::domain(format!("need 0 < R0 < R/10, got R0 = {r0}, R = {r}")));
    }
    if mesh < 128 {
        return Err(Error::Resolution(format!("mesh of {} elements is below 256", 2 * mesh)));
    }
    Ok(())
}

pub fn verify_hole_lemma(r0: f64, r: f64, lambda: f64, mesh: usize) -> Result<HoleLemmaReport> {
    check(r0, r, lambda, mesh / 2)?;
    let form = RadialForm::new(r0, r, lambda, mesh);
    let eigenvalue = form.smallest();
    let eigenvalue_coarse = RadialForm::new(r0, r, lambda, mesh / 2).smallest();
    let floor = RadialForm::new(r0, r, 0.0, mesh).smallest();
    let tol_disc = 4.0 * floor.abs() + (eigenvalue - eigenvalue_coarse).abs();
    let x = form.vector(eigenvalue);
    let outer = 0.1 * r;
    let total = form.mass_between(&x, 0.0, outer);
    let well = form.mass_between(&x, 0.0, r0);
    Ok(HoleLemmaReport {
        lambda,
        r0,
        r,
        mesh,
        bound_constant: hole_constant(r0, r, lambda),
        eigenvalue,
        eigenvalue_coarse,
        floor,
        tol_disc,
        holds: eigenvalue >= -tol_disc,
        concentration: (well / total) / (r0 / outer).powi(3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_lambda_is_pure_dirichlet_energy() {
        let rep = verify_hole_lemma(0.05, 1.0, 0.0, 512).unwrap();
        assert_eq!(rep.bound_constant, 0.0);
        assert!(rep.eigenvalue.abs() < 1e-6, "{}", rep.eigenvalue);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(verify_hole_lemma(0.05, 1.0, PI / 2.0, 512), Err(Error::Domain(_))));
        assert!(matches!(verify_hole_lemma(0.2, 1.0, 0.5, 512), Err(Error::Domain(_))));
        assert!(matches!(verify_hole_lemma(0.05, 1.0, 0.5, 64), Err(Error::Resolution(_))));
    }

    #[test]
    fn pi_over_four() {
        let rep = verify_hole_lemma(0.05, 1.0, PI / 4.0, 1024).unwrap();
        assert!(rep.holds, "{rep:?}");
        assert!(rep.concentration > 1.0, "{rep:?}");
    }

    #[test]
    fn bisection_matches_a_known_spectrum() {
        // λ = 0 and a coarse mesh: the second Neumann mode of the ball has
        // j1'(k R) = 0 with kR ≈ 4.4934, far above the zero mode.
        let f = RadialForm::new(0.05, 1.0, 0.0, 1024);
        let k = 4.493409457909064 / 0.1;
        assert_eq!(f.count_below(0.5 * k * k), 1);
        assert_eq!(f.count_below(1.01 * k * k), 2);
    }
}
