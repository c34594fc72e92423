//! Thermodynamics of the non-interacting Bose gas in the thermodynamic limit.
//!
//! Units are `hbar = 2m = 1`, so the one-particle energy is `p^2` and the
//! thermal density scale is `(4 pi beta)^(-3/2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::Quadrature;
use crate::special::{polylog, polylog_exp};

/// Orders of the Bose functions needed for density and pressure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoseOrder {
    /// `g_{3/2}`: density.
    ThreeHalves,
    /// `g_{5/2}`: pressure / free energy.
    FiveHalves,
}

impl BoseOrder {
    pub fn value(self) -> f64 {
        match self {
            BoseOrder::ThreeHalves => 1.5,
            BoseOrder::FiveHalves => 2.5,
        }
    }
}

/// Bose function `g_s(z) = sum_{l>=1} z^l / l^s` for `z` in `[0, 1]`.
pub fn bose_fn(order: BoseOrder, z: f64) -> Result<f64> {
    polylog(order.value(), z)
}

/// `g_s(e^w)` for log-fugacity `w = beta mu <= 0`.
pub fn bose_fn_exp(order: BoseOrder, w: f64) -> Result<f64> {
    polylog_exp(order.value(), w)
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("inverse temperature beta = {beta} must be positive and finite")))
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("density rho = {rho} must be positive and finite")))
    }
}

/// `(4 pi beta)^(-3/2)`.
pub fn thermal_density(beta: f64) -> f64 {
    (4.0 * PI * beta).powf(-1.5)
}

/// Critical density `rho_c(beta) = (4 pi beta)^(-3/2) zeta(3/2)`.
pub fn critical_density(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(thermal_density(beta) * bose_fn(BoseOrder::ThreeHalves, 1.0)?)
}

fn quadrature() -> Quadrature {
    Quadrature::with_tolerances(1e-300, 1e-13)
}

/// Density of thermally excited particles at chemical potential `mu <= 0`,
/// `(2 pi)^-3 ∫ dp 1/(e^{beta(p^2 - mu)} - 1)`, by radial quadrature.
///
/// At `mu = 0` this is the critical density.
pub fn excited_density_quadrature(beta: f64, mu: f64) -> Result<f64> {
    check_beta(beta)?;
    if mu > 0.0 {
        return Err(Error::domain(format!("chemical potential mu = {mu} must be <= 0")));
    }
    // Substitute q = sqrt(beta) p; integrand 4 pi q^2 / (e^{q^2 - beta mu} - 1).
    let shift = -beta * mu;
    let integrand = |q: f64| {
        let e = q * q + shift;
        if e == 0.0 {
            return 4.0 * PI;
        }
        4.0 * PI * q * q / e.exp_m1()
    };
    let est = quadrature().integrate_to_infinity(integrand, 0.0)?;
    Ok(est.value * beta.powf(-1.5) / (8.0 * PI.powi(3)))
}

/// Quadrature route to the critical density.
pub fn critical_density_quadrature(beta: f64) -> Result<f64> {
    excited_density_quadrature(beta, 0.0)
}

/// Chemical potential of the ideal gas: `0` for `rho >= rho_c(beta)`, otherwise
/// the root of `(4 pi beta)^(-3/2) g_{3/2}(e^{beta mu}) = rho`.
pub fn mu0(beta: f64, rho: f64) -> Result<f64> {
    check_beta(beta)?;
    check_rho(rho)?;
    let scale = thermal_density(beta);
    let target = rho / scale;
    let g_max = bose_fn(BoseOrder::ThreeHalves, 1.0)?;
    if target >= g_max {
        return Ok(0.0);
    }
    // Solve ln g_{3/2}(e^w) = ln target in w = beta mu < 0; the left side is increasing.
    let residual = |w: f64| -> Result<f64> { Ok(bose_fn_exp(BoseOrder::ThreeHalves, w)?.ln() - target.ln()) };
    // g_{3/2}(z) ~ z for small z, so the root sits near ln(target) when target is tiny.
    let mut lo = (-50.0f64).min(target.ln() - 1.0);
    let mut hi = 0.0;
    if residual(lo)? > 0.0 {
        return Err(Error::Bracket(format!("no bracket for beta mu at rho = {rho}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-6 * (1.0 + lo.abs()) {
            break;
        }
    }
    // Safeguarded Newton: d/dw ln g_{3/2}(e^w) = g_{1/2}(e^w) / g_{3/2}(e^w). Near
    // w = 0 the derivative blows up, so steps leaving the bracket fall back to bisection.
    let mut w = 0.5 * (lo + hi);
    for _ in 0..200 {
        let g32 = bose_fn_exp(BoseOrder::ThreeHalves, w)?;
        let r = g32.ln() - target.ln();
        if r == 0.0 {
            break;
        }
        if r > 0.0 {
            hi = w;
        } else {
            lo = w;
        }
        let g12 = polylog_exp(0.5, w)?;
        let newton = w - r * g32 / g12;
        let next = if newton >= lo && newton <= hi && newton.is_finite() { newton } else { 0.5 * (lo + hi) };
        let done = (next - w).abs() <= 1e-15 * w.abs() || hi - lo <= 1e-15 * lo.abs();
        w = next;
        if done {
            break;
        }
    }
    let rel = (thermal_density(beta) * bose_fn_exp(BoseOrder::ThreeHalves, w)? - rho).abs() / rho;
    if rel > 1e-10 {
        return Err(Error::numerical(format!("mu0 root-find residual {rel:e} at rho = {rho}")));
    }
    Ok(w / beta)
}

/// Free energy density `f_0(beta, rho) = mu_0 rho - beta^-1 (4 pi beta)^(-3/2) g_{5/2}(e^{beta mu_0})`.
pub fn f0(beta: f64, rho: f64) -> Result<f64> {
    let mu = mu0(beta, rho)?;
    f0_at(beta, rho, mu)
}

fn f0_at(beta: f64, rho: f64, mu: f64) -> Result<f64> {
    let g52 = bose_fn_exp(BoseOrder::FiveHalves, beta * mu)?;
    Ok(mu * rho - thermal_density(beta) * g52 / beta)
}

/// The functional maximized in the variational formula for `f_0`,
/// `mu rho + ((2 pi)^3 beta)^-1 ∫ dp ln(1 - e^{-beta(p^2 - mu)})`, evaluated by quadrature.
pub fn free_energy_functional(beta: f64, rho: f64, mu: f64) -> Result<f64> {
    check_beta(beta)?;
    if mu > 0.0 {
        return Err(Error::domain(format!("chemical potential mu = {mu} must be <= 0")));
    }
    let shift = -beta * mu;
    let integrand = |q: f64| {
        let e = q * q + shift;
        if e == 0.0 {
            return 0.0;
        }
        let log_term = if e < 1.0 { (-(-e).exp_m1()).ln() } else { (-(-e).exp()).ln_1p() };
        4.0 * PI * q * q * log_term
    };
    let est = quadrature().integrate_to_infinity(integrand, 0.0)?;
    Ok(mu * rho + est.value * beta.powf(-1.5) / (8.0 * PI.powi(3) * beta))
}

/// Quadrature route to `f_0`: the functional evaluated at the optimal `mu_0`.
pub fn f0_quadrature(beta: f64, rho: f64) -> Result<f64> {
    let mu = mu0(beta, rho)?;
    free_energy_functional(beta, rho, mu)
}

/// Condensate density `[rho - rho_c(beta)]_+`.
pub fn condensate_density(beta: f64, rho: f64) -> Result<f64> {
    if rho < 0.0 {
        return Err(Error::domain(format!("density rho = {rho} must be >= 0")));
    }
    Ok((rho - critical_density(beta)?).max(0.0))
}

/// Specific heat `c_V = -T d^2 f_0 / dT^2` at fixed density, by central
/// differences with temperature step `h`.
pub fn specific_heat(beta: f64, rho: f64, h: f64) -> Result<f64> {
    check_beta(beta)?;
    check_rho(rho)?;
    let t = 1.0 / beta;
    if !(h > 0.0) || h < 1e-9 * t {
        return Err(Error::numerical(format!("temperature step h = {h} underflows at T = {t}")));
    }
    if h >= t {
        return Err(Error::domain(format!("temperature step h = {h} must be smaller than T = {t}")));
    }
    let f = |temp: f64| f0(1.0 / temp, rho);
    let second = (f(t + h)? - 2.0 * f(t)? + f(t - h)?) / (h * h);
    Ok(-t * second)
}

/// Phase of the ideal gas at given `(beta, rho)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Condensed,
    Normal,
}

/// All ideal-gas observables at one state point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealGasPoint {
    pub beta: f64,
    pub rho: f64,
    pub mu0: f64,
    pub rho_c: f64,
    pub f0: f64,
    pub condensate: f64,
    pub specific_heat: f64,
    pub phase: Phase,
}

impl IdealGasPoint {
    /// Evaluates every observable; the specific heat uses a step of `1e-3 T`.
    pub fn new(beta: f64, rho: f64) -> Result<Self> {
        let rho_c = critical_density(beta)?;
        let mu = mu0(beta, rho)?;
        let f = f0_at(beta, rho, mu)?;
        let cv = specific_heat(beta, rho, 1e-3 / beta)?;
        Ok(IdealGasPoint {
            beta,
            rho,
            mu0: mu,
            rho_c,
            f0: f,
            condensate: (rho - rho_c).max(0.0),
            specific_heat: cv,
            phase: if rho >= rho_c { Phase::Condensed } else { Phase::Normal },
        })
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu0_just_below_critical_density() {
        let beta = 1.0 / 1.001;
        let rc = critical_density(beta).unwrap();
        for frac in [0.9999, 0.99977, 0.9999999] {
            let rho = frac * rc;
            let mu = mu0(beta, rho).unwrap();
            assert!(mu < 0.0);
            let back = thermal_density(beta) * bose_fn_exp(BoseOrder::ThreeHalves, beta * mu).unwrap();
            assert!((back / rho - 1.0).abs() < 1e-10, "{frac}");
        }
    }

    #[test]
    fn g52_at_zero_is_zero() {
        assert_eq!(bose_fn(BoseOrder::FiveHalves, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bose_fn(BoseOrder::ThreeHalves, 1.5), Err(Error::Domain(_))));
        assert!(matches!(critical_density(0.0), Err(Error::Domain(_))));
        assert!(matches!(critical_density(-1.0), Err(Error::Domain(_))));
        assert!(matches!(mu0(1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(condensate_density(1.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(specific_heat(1.0, 1.0, 1e-14), Err(Error::Numerical(_))));
    }

    #[test]
    fn critical_density_scales_as_beta_to_minus_three_halves() {
        let one = critical_density(1.0).unwrap();
        let four = critical_density(4.0).unwrap();
        assert!((four - one / 8.0).abs() < 1e-15);
        assert!(critical_density(1e6).unwrap() < 1e-10);
    }

    #[test]
    fn mu0_is_zero_at_and_above_critical_density() {
        let rc = critical_density(1.0).unwrap();
        assert_eq!(mu0(1.0, rc).unwrap(), 0.0);
        assert_eq!(mu0(1.0, 2.0 * rc).unwrap(), 0.0);
        assert!(mu0(1.0, 0.5 * rc).unwrap() < 0.0);
    }

    #[test]
    fn mu0_handles_classical_limit() {
        // rho far below the e^{-50} bracket edge.
        let rho = thermal_density(1.0) * 1e-30;
        let mu = mu0(1.0, rho).unwrap();
        assert!((mu - (1e-30f64).ln()).abs() < 1e-6);
    }

    #[test]
    fn condensate_is_positive_part() {
        let rc = critical_density(2.0).unwrap();
        assert_eq!(condensate_density(2.0, rc).unwrap(), 0.0);
        assert!((condensate_density(2.0, 2.0 * rc).unwrap() - rc).abs() < 1e-16);
        assert_eq!(condensate_density(2.0, 0.5 * rc).unwrap(), 0.0);
    }

    #[test]
    fn point_labels_phase() {
        let rc = critical_density(1.0).unwrap();
        assert_eq!(IdealGasPoint::new(1.0, rc).unwrap().phase, Phase::Condensed);
        assert_eq!(IdealGasPoint::new(1.0, 0.9 * rc).unwrap().phase, Phase::Normal);
    }
}
