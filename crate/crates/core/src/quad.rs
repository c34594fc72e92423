//! Globally adaptive Gauss–Kronrod quadrature and fixed Gauss–Legendre rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 tables).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error: err }
}

/// Adaptive integrator: the interval with the largest local error is bisected
/// until the summed error estimate meets `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { abs_tol: 1e-300, rel_tol: 1e-10, max_segments: 4000 }
    }
}

impl Quadrature {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Quadrature { abs_tol, rel_tol, ..Default::default() }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        if a == b {
            return Ok(Estimate { value: 0.0, error: 0.0 });
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain("integration limits must be finite"));
        }
        let first = kronrod15(&f, a, b);
        if !first.value.is_finite() {
            return Err(Error::numerical(format!("non-finite integrand on [{a}, {b}]")));
        }
        let mut heap = BinaryHeap::new();
        let mut total = first.value;
        let mut total_err = first.error;
        heap.push(first);
        while total_err > self.abs_tol.max(self.rel_tol * total.abs()) {
            if heap.len() >= self.max_segments {
                return Err(Error::numerical(format!(
                    "quadrature on [{a}, {b}] did not converge: error {total_err:e} after {} segments",
                    heap.len()
                )));
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
                // Interval can no longer be split in floating point; accept it.
                heap.push(Segment { error: 0.0, ..worst });
                total_err -= worst.error;
                continue;
            }
            let left = kronrod15(&f, worst.a, mid);
            let right = kronrod15(&f, mid, worst.b);
            if !(left.value.is_finite() && right.value.is_finite()) {
                return Err(Error::numerical(format!(
                    "non-finite integrand near {mid} while integrating on [{a}, {b}]"
                )));
            }
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
        // Re-sum to shed the drift accumulated by the incremental updates.
        let value = heap.iter().map(|s| s.value).sum();
        let error = heap.iter().map(|s| s.error).sum();
        Ok(Estimate { value, error })
    }

    /// Integral over `[a, ∞)` through the map `x = a + t/(1-t)`.
    pub fn integrate_to_infinity<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> Result<Estimate> {
        let g = |t: f64| {
            if t >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - t;
            let x = a + t / one_minus;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v / (one_minus * one_minus)
            }
        };
        self.integrate(g, 0.0, 1.0)
    }

    /// Integral over consecutive pieces `[p0, p1], [p1, p2], ...`; use this when the
    /// integrand has kinks or jumps at known points.
    pub fn integrate_pieces<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<Estimate> {
        let mut out = Estimate { value: 0.0, error: 0.0 };
        for w in points.windows(2) {
            if w[1] > w[0] {
                let e = self.integrate(&f, w[0], w[1])?;
                out.value += e.value;
                out.error += e.error;
            }
        }
        Ok(out)
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            nodes[0] = 0.0;
            weights[0] = 2.0;
            break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed-order Gauss–Legendre integral of `f` over `[a, b]`.
pub fn gauss_legendre_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    x.iter().zip(&w).map(|(xi, wi)| wi * f(c + h * xi)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in 1..8 {
            let deg = 2 * n - 1;
            let v = gauss_legendre_integral(|x| x.powi(deg as i32 - 1) + 1.0, 0.0, 2.0, n);
            let exact = 2f64.powi(deg as i32) / deg as f64 + 2.0;
            assert!((v - exact).abs() < 1e-12 * exact, "n={n}: {v} vs {exact}");
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let q = Quadrature::with_tolerances(1e-14, 1e-12);
        let e = q.integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0).unwrap();
        assert!((e.value - 2.0).abs() < 1e-10, "{}", e.value);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let q = Quadrature::with_tolerances(1e-15, 1e-12);
        let e = q.integrate_to_infinity(|x: f64| (-x * x).exp(), 0.0).unwrap();
        let exact = 0.5 * std::f64::consts::PI.sqrt();
        assert!((e.value - exact).abs() < 1e-12);
    }

    #[test]
    fn pieces_integrate_a_step_exactly() {
        let q = Quadrature::default();
        let e = q.integrate_pieces(|x: f64| if x <= 1.0 { 3.0 } else { 0.0 }, &[0.0, 1.0, 2.0]).unwrap();
        assert!((e.value - 3.0).abs() < 1e-14);
    }
}
