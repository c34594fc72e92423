//! Riemann zeta and the polylogarithm `Li_s(z)` on `0 <= z <= 1`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

// B_2, B_4, ..., B_24
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Riemann zeta function for real `s != 1`.
///
/// Euler–Maclaurin summation for `s > 0`, the functional equation otherwise.
pub fn zeta(s: f64) -> f64 {
    if s == 1.0 {
        return f64::INFINITY;
    }
    if s <= 0.0 {
        if s == 0.0 {
            return -0.5;
        }
        if s.fract() == 0.0 && (s as i64) % 2 == 0 {
            return 0.0;
        }
        let t = 1.0 - s;
        return 2f64.powf(s) * PI.powf(s - 1.0) * (0.5 * PI * s).sin() * gamma(t) * zeta(t);
    }
    const N: usize = 20;
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising product s (s+1) ... (s+2k-2) / (2k)!
    let mut coeff = s / 2.0;
    let mut power = n.powf(-s - 1.0);
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b * coeff * power;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let kk = (k + 1) as f64;
        coeff *= (s + 2.0 * kk - 1.0) * (s + 2.0 * kk) / ((2.0 * kk + 1.0) * (2.0 * kk + 2.0));
        power /= n * n;
    }
    sum
}

const DIRECT_SERIES_MAX_Z: f64 = 0.5;
const EXPANSION_TERMS: usize = 60;

/// Coefficients `zeta(s - k) / k!` of the expansion of `Li_s(e^w)` around `w = 0`.
fn expansion_coefficients(s: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(EXPANSION_TERMS);
    let mut factorial = 1.0;
    for k in 0..EXPANSION_TERMS {
        if k > 0 {
            factorial *= k as f64;
        }
        out.push(zeta(s - k as f64) / factorial);
    }
    out
}

fn cached_coefficients(s: f64) -> Option<&'static [f64]> {
    static HALF: OnceLock<Vec<f64>> = OnceLock::new();
    static THREE_HALVES: OnceLock<Vec<f64>> = OnceLock::new();
    static FIVE_HALVES: OnceLock<Vec<f64>> = OnceLock::new();
    let cell = match s {
        0.5 => &HALF,
        1.5 => &THREE_HALVES,
        2.5 => &FIVE_HALVES,
        _ => return None,
    };
    Some(cell.get_or_init(|| expansion_coefficients(s)))
}

/// `Li_s(z) = sum_{l>=1} z^l / l^s` for `0 <= z <= 1` and non-integer `s > 0`.
///
/// Below `z = 1/2` the defining series converges geometrically and is summed
/// directly. Above it the series in `w = ln z`,
/// `Li_s(e^w) = Gamma(1-s) (-w)^(s-1) + sum_k zeta(s-k) w^k / k!`,
/// converges like `(|w| / 2 pi)^k`. Returns `+inf` at `z = 1` when `s <= 1`.
pub fn polylog(s: f64, z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) || z.is_nan() {
        return Err(Error::domain(format!("fugacity z = {z} outside [0, 1]")));
    }
    if !(s > 0.0) || s.fract() == 0.0 {
        return Err(Error::domain(format!("polylog order s = {s} must be positive and non-integer")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z <= DIRECT_SERIES_MAX_Z {
        let mut sum = 0.0;
        let mut zl = 1.0;
        for l in 1..200 {
            zl *= z;
            let term = zl / (l as f64).powf(s);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        return Ok(sum);
    }
    if z == 1.0 {
        return Ok(if s > 1.0 { zeta(s) } else { f64::INFINITY });
    }
    Ok(expansion(s, z.ln()))
}

/// `Li_s(e^w)` for `w <= 0`, taking the log-fugacity directly so that `w` close to
/// zero keeps full relative precision.
pub fn polylog_exp(s: f64, w: f64) -> Result<f64> {
    if !(w <= 0.0) {
        return Err(Error::domain(format!("log-fugacity w = {w} must be non-positive")));
    }
    let z = w.exp();
    if z <= DIRECT_SERIES_MAX_Z || w == 0.0 {
        return polylog(s, z);
    }
    if !(s > 0.0) || s.fract() == 0.0 {
        return Err(Error::domain(format!("polylog order s = {s} must be positive and non-integer")));
    }
    Ok(expansion(s, w))
}

fn expansion(s: f64, w: f64) -> f64 {
    let owned;
    let coeffs: &[f64] = match cached_coefficients(s) {
        Some(c) => c,
        None => {
            owned = expansion_coefficients(s);
            &owned
        }
    };
    let mut sum = gamma(1.0 - s) * (-w).powf(s - 1.0);
    let mut wk = 1.0;
    for c in coeffs {
        let term = c * wk;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() && wk.abs() < 1e-3 {
            break;
        }
        wk *= w;
    }
    sum
}
