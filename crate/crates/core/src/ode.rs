//! Dormand–Prince 5(4) integrator for the linear radial equation `u'' = q(r) u`.
//!
//! The solver stops exactly at every requested point, so callers put jumps of
//! `q` into the stop list and no step ever straddles a discontinuity.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b* (difference between the 5th- and 4th-order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Values above this are rescaled; the equation is linear so only ratios matter.
const RESCALE_ABOVE: f64 = 1e100;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 { rtol: 1e-10, atol: 1e-14, max_steps: 2_000_000 }
    }
}

/// State `(u, u')` recorded at one stop point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub r: f64,
    pub u: f64,
    pub du: f64,
}

type State = [f64; 2];

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

impl Dopri5 {
    /// Integrates `u'' = q(r) u` from `(r0, u0, du0)` through the sorted `stops`
    /// (all `> r0`), returning the state at each stop.
    ///
    /// `q` is evaluated only at interior points of each `[stop_k, stop_{k+1}]`
    /// piece plus its end points, approached from inside, via `q(r, piece_mid)`
    /// so that a jump at a stop can be resolved to the correct side.
    pub fn integrate<Q>(&self, q: Q, r0: f64, u0: f64, du0: f64, stops: &[f64]) -> Result<Vec<Sample>>
    where
        Q: Fn(f64, f64) -> f64,
    {
        if stops.windows(2).any(|w| !(w[1] >= w[0])) || stops.first().is_some_and(|s| !(*s >= r0)) {
            return Err(Error::domain("ODE stop points must be sorted and not precede the start"));
        }
        let mut out: Vec<Sample> = Vec::with_capacity(stops.len());
        let mut r = r0;
        let mut y: State = [u0, du0];
        let mut h = 0.0;
        let mut steps = 0usize;
        for &stop in stops {
            if stop > r {
                let mid = 0.5 * (r + stop);
                let f = |x: f64, y: &State| -> State { [y[1], q(x, mid) * y[0]] };
                if h == 0.0 || h > stop - r {
                    h = (stop - r).min(initial_step(&f, r, &y, self.rtol));
                }
                let mut k1 = f(r, &y);
                loop {
                    let last = r + h >= stop || (stop - (r + h)) < 0.01 * h;
                    let h_try = if last { stop - r } else { h };
                    let k2 = f(r + C2 * h_try, &axpy(&y, h_try, &[(A21, &k1)]));
                    let k3 = f(r + C3 * h_try, &axpy(&y, h_try, &[(A31, &k1), (A32, &k2)]));
                    let k4 = f(r + C4 * h_try, &axpy(&y, h_try, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
                    let k5 = f(r + C5 * h_try, &axpy(&y, h_try, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
                    let t6 = if last { stop } else { r + h_try };
                    let k6 = f(t6, &axpy(&y, h_try, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
                    let y_new = axpy(&y, h_try, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
                    let k7 = f(t6, &y_new);
                    let mut err2 = 0.0;
                    for i in 0..2 {
                        let e = h_try * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                        let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                        err2 += (e / sc) * (e / sc);
                    }
                    let err = (0.5 * err2).sqrt();
                    steps += 1;
                    if steps > self.max_steps {
                        return Err(Error::numerical(format!(
                            "ODE step control exceeded {} steps near r = {r}",
                            self.max_steps
                        )));
                    }
                    if !err.is_finite() {
                        return Err(Error::numerical(format!("ODE solution blew up near r = {r}")));
                    }
                    let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    if err <= 1.0 {
                        r = if last { stop } else { r + h_try };
                        y = y_new;
                        k1 = k7;
                        if y[0].abs().max(y[1].abs()) > RESCALE_ABOVE {
                            let s = 1.0 / RESCALE_ABOVE;
                            y = [y[0] * s, y[1] * s];
                            k1 = [k1[0] * s, k1[1] * s];
                            for sample in out.iter_mut() {
                                sample.u *= s;
                                sample.du *= s;
                            }
                        }
                        if !last {
                            h = h_try * factor;
                        }
                        if last {
                            break;
                        }
                    } else {
                        h = h_try * factor.min(1.0);
                        if h < 1e-15 * r.abs().max(1.0) {
                            return Err(Error::numerical(format!("ODE step size underflow near r = {r}")));
                        }
                    }
                }
            }
            out.push(Sample { r: stop, u: y[0], du: y[1] });
        }
        Ok(out)
    }
}

fn initial_step<F: Fn(f64, &State) -> State>(f: &F, r: f64, y: &State, rtol: f64) -> f64 {
    let k = f(r, y);
    let d0 = y[0].abs().max(y[1].abs()).max(1e-300);
    let d1 = k[0].abs().max(k[1].abs()).max(1e-300);
    (0.01 * d0 / d1).min(1.0) * rtol.powf(0.2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_equation_is_linear() {
        let out = Dopri5::default().integrate(|_, _| 0.0, 0.0, 0.0, 1.0, &[1.0, 2.5]).unwrap();
        assert!((out[0].u - 1.0).abs() < 1e-14);
        assert!((out[1].u - 2.5).abs() < 1e-14);
    }

    #[test]
    fn exponential_growth_matches_sinh() {
        let k: f64 = 3.0;
        let out = Dopri5::default().integrate(|_, _| k * k, 0.0, 0.0, 1.0, &[2.0]).unwrap();
        let exact = (k * 2.0).sinh() / k;
        assert!((out[0].u - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn oscillation_matches_sine() {
        let out = Dopri5::default().integrate(|_, _| -1.0, 0.0, 0.0, 1.0, &[1.0, 10.0]).unwrap();
        assert!((out[0].u - 1f64.sin()).abs() < 1e-9);
        assert!((out[1].u - 10f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn jump_at_a_stop_is_resolved() {
        // q = 4 on [0, 1), 0 after: u = sinh(2r)/2 then linear.
        let q = |_r: f64, mid: f64| if mid < 1.0 { 4.0 } else { 0.0 };
        let out = Dopri5::default().integrate(q, 0.0, 0.0, 1.0, &[1.0, 3.0]).unwrap();
        let (u1, du1) = (2f64.sinh() / 2.0, 2f64.cosh());
        assert!((out[0].u - u1).abs() < 1e-9 * u1);
        assert!((out[1].u - (u1 + 2.0 * du1)).abs() < 1e-9 * out[1].u);
    }

    #[test]
    fn huge_growth_is_rescaled() {
        let out = Dopri5::default().integrate(|_, _| 1e4, 0.0, 0.0, 1.0, &[1.0, 3.0, 4.0]).unwrap();
        assert!(out.iter().all(|s| s.u.is_finite()));
        // Ratio u / u' approaches 1/k = 0.01 for sinh.
        assert!((out[2].u / out[2].du - 0.01).abs() < 1e-9);
    }
}
