//! Lower bound on the free energy of the dilute Bose gas,
//! `f >= f_0 + 4πa (2ρ² - [ρ - ρ_c]_+²)(1 - o(1))`, with the explicit
//! parameter choices of the two temperature regimes and the error budget
//! `Z1..Z4` evaluated with every unnamed constant set to 1.
//!
//! The constants are never pinned down, so the error factors reported here
//! show how the errors scale with the parameters. They are not rigorous.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal_gas::{critical_density, f0, mu0};

pub const A_MIN: f64 = 4.0 / 403.0;
pub const A_MAX: f64 = 79.0 / 403.0;
pub const B_MIN: f64 = 2.0 / 403.0;
pub const B_MAX: f64 = 161.0 / 403.0;
/// Upper end of the admissible `δ` range for the high-temperature bound.
pub const DELTA_MAX: f64 = 2.0 / 403.0;
pub const DEFAULT_DELTA: f64 = 1e-4;

pub const DISCLAIMER: &str = "illustrative, not rigorous: unnamed constants set to 1; \
     the two branch bounds are combined by a pointwise maximum";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    HighT,
    LowT,
}

/// Parameters of one branch. Quantities that a branch does not use are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub branch: Branch,
    /// `aρ²β^{5/2}` for the high-temperature branch, `a³ρ` for the low-temperature one.
    pub small_x: f64,
    pub r: f64,
    pub s: f64,
    pub kappa: f64,
    /// `κ' = κ - (24 ã / π²)(4 R0)² / R³`.
    pub kappa_prime: f64,
    pub delta: f64,
    pub b: Option<f64>,
    pub p_c: Option<f64>,
    pub phi: Option<f64>,
    pub c: Option<f64>,
    pub epsilon: Option<f64>,
    pub a_exp: Option<f64>,
    pub b_exp: Option<f64>,
}

/// Scale separations that the parameter choice is supposed to produce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ordering {
    /// `R / R0`
    pub r_over_r0: f64,
    /// `s / R`
    pub s_over_r: f64,
    /// `κβ / s²`
    pub kappa_beta_over_s2: f64,
}

impl ParameterSet {
    pub fn ordering(&self, beta: f64, r0: f64) -> Ordering {
        Ordering {
            r_over_r0: self.r / r0,
            s_over_r: self.s / self.r,
            kappa_beta_over_s2: self.kappa * beta / (self.s * self.s),
        }
    }
}

/// Both branches' parameters at one state point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub high_t: ParameterSet,
    pub low_t: ParameterSet,
}

/// Inputs that refine the defaults `ã = a`, `R0 = a`, `δ = 1e-4`, `(A, B) = (4/403, 2/403)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConfig {
    pub a: f64,
    pub beta: f64,
    pub rho: f64,
    pub delta: f64,
    pub a_exp: f64,
    pub b_exp: f64,
    /// Scattering length of the truncated potential.
    pub a_tilde: Option<f64>,
    /// Range of the potential.
    pub r0: Option<f64>,
}

impl BoundConfig {
    pub fn new(a: f64, beta: f64, rho: f64) -> Self {
        BoundConfig { a, beta, rho, delta: DEFAULT_DELTA, a_exp: A_MIN, b_exp: B_MIN, a_tilde: None, r0: None }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    fn a_tilde(&self) -> f64 {
        self.a_tilde.unwrap_or(self.a)
    }

    fn r0(&self) -> f64 {
        self.r0.unwrap_or(self.a)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("beta", self.beta), ("rho", self.rho)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} = {v} must be positive and finite")));
            }
        }
        if !(self.delta > 0.0 && self.delta < DELTA_MAX) {
            return Err(Error::domain(format!("delta = {} must lie in (0, 2/403)", self.delta)));
        }
        if !(A_MIN..=A_MAX).contains(&self.a_exp) {
            return Err(Error::domain(format!("A = {} must lie in [4/403, 79/403]", self.a_exp)));
        }
        if !(B_MIN..=B_MAX).contains(&self.b_exp) {
            return Err(Error::domain(format!("B = {} must lie in [2/403, 161/403]", self.b_exp)));
        }
        if let Some(t) = self.a_tilde {
            if !(t > 0.0 && t <= self.a) {
                return Err(Error::domain(format!("a_tilde = {t} must lie in (0, a]")));
            }
        }
        if let Some(r0) = self.r0 {
            if !(r0 >= 0.0 && r0.is_finite()) {
                return Err(Error::domain(format!("R0 = {r0} must be finite and >= 0")));
            }
        }
        Ok(())
    }
}

/// `4πa (2ρ² - [ρ - ρ_c(β)]_+²)`.
pub fn correction_term(a: f64, beta: f64, rho: f64) -> Result<f64> {
    if !(a >= 0.0) || !(rho >= 0.0) {
        return Err(Error::domain(format!("need a >= 0 and rho >= 0, got a = {a}, rho = {rho}")));
    }
    let excess = (rho - critical_density(beta)?).max(0.0);
    Ok(4.0 * PI * a * (2.0 * rho * rho - excess * excess))
}

/// Leading-order ground state energy density `4πaρ²`.
pub fn ground_state_energy(a: f64, rho: f64) -> Result<f64> {
    if !(a >= 0.0) || !(rho >= 0.0) {
        return Err(Error::domain(format!("need a >= 0 and rho >= 0, got a = {a}, rho = {rho}")));
    }
    Ok(4.0 * PI * a * rho * rho)
}

/// Exponent `α = 2/2295 - δ` of the uniform error bound.
pub fn alpha_exponent(delta: f64) -> Result<f64> {
    let top = 2.0 / 2295.0;
    if !(delta > 0.0 && delta < top) {
        return Err(Error::domain(format!("delta = {delta} must lie in (0, 2/2295)")));
    }
    Ok(top - delta)
}

fn kappa_prime(kappa: f64, a_tilde: f64, r0: f64, r: f64) -> f64 {
    kappa - 24.0 * a_tilde / (PI * PI) * (4.0 * r0).powi(2) / r.powi(3)
}

/// Parameter choices of both branches.
pub fn choose_parameters(cfg: &BoundConfig) -> Result<Parameters> {
    cfg.validate()?;
    let BoundConfig { a, beta, rho, delta, a_exp, b_exp, .. } = *cfg;
    let (a_tilde, r0) = (cfg.a_tilde(), cfg.r0());
    let x = a * rho * rho * beta.powf(2.5);

    let r = rho.powf(-1.0 / 3.0) * x.powf(3.0 / 403.0);
    let b = beta.sqrt() * x.powf(-121.0 / 403.0);
    let s = (beta * rho.powf(-1.0 / 3.0)).cbrt() * x.powf(1.0 / 403.0);
    let kappa = s * s / beta * x.powf(-delta);
    let mu = mu0(beta, rho)?;
    let p_c = if beta * mu.abs() <= x.powf(162.0 / 403.0) { x.powf(81.0 / 403.0) / beta.sqrt() } else { 0.0 };
    let high_t = ParameterSet {
        branch: Branch::HighT,
        small_x: x,
        r,
        s,
        kappa,
        kappa_prime: kappa_prime(kappa, a_tilde, r0, r),
        delta,
        b: Some(b),
        p_c: Some(p_c),
        phi: Some(a * x.powf(-a_exp)),
        c: Some(x.powf(-b_exp)),
        epsilon: None,
        a_exp: Some(a_exp),
        b_exp: Some(b_exp),
    };

    let y = a.powi(3) * rho;
    let kappa = y.powf(1.0 / 17.0);
    let r = a * y.powf(-5.0 / 17.0);
    let s = (beta * y.powf(1.0 / 17.0 + delta)).sqrt();
    let epsilon = (y.powf(3.0 / 85.0) / x.powf(0.4)).sqrt();
    let low_t = ParameterSet {
        branch: Branch::LowT,
        small_x: y,
        r,
        s,
        kappa,
        kappa_prime: kappa_prime(kappa, a_tilde, r0, r),
        delta,
        b: None,
        p_c: None,
        phi: None,
        c: None,
        epsilon: Some(epsilon),
        a_exp: None,
        b_exp: None,
    };
    Ok(Parameters { high_t, low_t })
}

/// Error densities `Z^(i) / |Λ|` of the high-temperature argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZBudget {
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub z4: f64,
}

impl ZBudget {
    pub fn terms(&self) -> [f64; 4] {
        [self.z1, self.z2, self.z3, self.z4]
    }

    pub fn total(&self) -> f64 {
        self.terms().iter().sum()
    }
}

/// Budget of the high-temperature branch and its error factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub z: ZBudget,
    /// `Z^(i) / (|Λ| 4πaρ²)`.
    pub z_ratio: ZBudget,
    /// `(aρ²β^{5/2})^{2/403 - δ}`.
    pub headline: f64,
    /// `max(headline, Σ Z^(i) / (|Λ| 4πaρ²))`.
    pub error_factor: f64,
}

/// Evaluates `Z1..Z4` per unit volume with unit constants, `M/|Λ| = p_c³/(6π²)`,
/// `P/|Λ| = p_c/β`, and the rapid-decay remainder `∫_{b/s}^∞ r⁶|m|` set to `e^{-b/s}`.
pub fn error_budget(params: &ParameterSet, cfg: &BoundConfig) -> Result<BudgetReport> {
    cfg.validate()?;
    let (Some(b), Some(p_c), Some(phi), Some(c)) = (params.b, params.p_c, params.phi, params.c) else {
        return Err(Error::domain("the Z budget belongs to the high-temperature branch"));
    };
    let BoundConfig { a, beta, rho, .. } = *cfg;
    let (at, r0) = (cfg.a_tilde(), cfg.r0());
    let (r, s, kappa) = (params.r, params.s, params.kappa);
    let mu = mu0(beta, rho)?;
    let rho_omega = rho.min(critical_density(beta)?);
    let m = p_c.powi(3) / (6.0 * PI * PI);
    let big_p = p_c / beta;
    let gap = p_c * p_c - mu;
    let root_c = 1.0 + 2.0 / c.sqrt();

    let z1 = m * gap + 16.0 * PI * rho * phi * m + 32.0 * PI * at * c * m * m * (1.0 + 2.0 * phi / (at * c)).powi(2);
    let z2 = 8.0 * PI * phi * big_p * big_p + 16.0 * PI * phi * big_p * rho * root_c;
    let z3 = rho * at.powf(1.5) / beta.sqrt()
        * (p_c + (-mu).sqrt()).powf(-0.5)
        * (r.powi(-3) + c * (rho * root_c + rho_omega));
    let z4 = at
        * (rho * rho * (kappa + r / s + r * p_c + (r.powi(3) * rho).cbrt() + (r0 / r).powi(3))
            + rho / (r * r * s) * (-b / s).exp()
            + r.powi(-6) * (b.powi(3) * at * beta * rho * rho + gap.powf(-0.5) / b).sqrt());
    let z = ZBudget { z1, z2, z3, z4 };
    if z.terms().iter().any(|t| !t.is_finite()) {
        return Err(Error::numerical(format!("non-finite error budget {z:?}")));
    }
    let main = 4.0 * PI * a * rho * rho;
    let z_ratio = ZBudget { z1: z1 / main, z2: z2 / main, z3: z3 / main, z4: z4 / main };
    let headline = params.small_x.powf(2.0 / 403.0 - params.delta);
    Ok(BudgetReport { z, z_ratio, headline, error_factor: headline.max(z_ratio.total()) })
}

/// `o(1)` of the low-temperature bound `f >= f_0 + 4πaρ²(1 - o(1))`, unit constants.
pub fn low_t_error(cfg: &BoundConfig) -> Result<f64> {
    cfg.validate()?;
    let BoundConfig { a, beta, rho, delta, .. } = *cfg;
    let x = a * rho * rho * beta.powf(2.5);
    let y = a.powi(3) * rho;
    Ok(y.powf(1.0 / 17.0) * (1.0 + 1.0 / x) + y.powf(3.0 / 170.0 - 2.0 * delta) / x.powf(0.2))
}

/// One branch's bound written in the common form `f_0 + correction (1 - error_factor)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchBound {
    pub branch: Branch,
    pub value: f64,
    pub error_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub a: f64,
    pub beta: f64,
    pub rho: f64,
    pub a_tilde: f64,
    pub r0: f64,
    pub f0_term: f64,
    pub correction: f64,
    /// Branch achieving the larger bound.
    pub branch: Branch,
    /// Branch the crossover rule `aρ²β^{5/2} <= (a³ρ)^{403/6885}` selects.
    pub rule_branch: Branch,
    pub error_factor: f64,
    pub lower_bound: f64,
    pub high_t: BranchBound,
    pub low_t: BranchBound,
    pub parameters: Parameters,
    pub budget: BudgetReport,
    /// `o(1)` of the low-temperature estimate.
    pub low_t_o1: f64,
    /// `aρβ^{-3/2}`, the bound on the term the low-temperature estimate gives up.
    pub bridging_bound: f64,
    /// `4πa(ρ² - [ρ - ρ_c]_+²)`, the term itself.
    pub bridging_term: f64,
    pub note: String,
}

/// Both branch bounds and their maximum.
pub fn lower_bound(cfg: &BoundConfig) -> Result<BoundReport> {
    cfg.validate()?;
    let BoundConfig { a, beta, rho, .. } = *cfg;
    let params = choose_parameters(cfg)?;
    let budget = error_budget(&params.high_t, cfg)?;
    let f0_term = f0(beta, rho)?;
    let correction = correction_term(a, beta, rho)?;
    let main = ground_state_energy(a, rho)?;

    let high_t = BranchBound {
        branch: Branch::HighT,
        value: f0_term + correction * (1.0 - budget.error_factor),
        error_factor: budget.error_factor,
    };
    let o1 = low_t_error(cfg)?;
    let low_t = BranchBound {
        branch: Branch::LowT,
        value: f0_term + main * (1.0 - o1),
        error_factor: 1.0 - main * (1.0 - o1) / correction,
    };
    let chosen = if low_t.value > high_t.value { &low_t } else { &high_t };
    let x = params.high_t.small_x;
    let rule_branch = if x <= params.low_t.small_x.powf(403.0 / 6885.0) { Branch::HighT } else { Branch::LowT };
    Ok(BoundReport {
        a,
        beta,
        rho,
        a_tilde: cfg.a_tilde(),
        r0: cfg.r0(),
        f0_term,
        correction,
        branch: chosen.branch,
        rule_branch,
        error_factor: chosen.error_factor,
        lower_bound: chosen.value,
        high_t: high_t.clone(),
        low_t: low_t.clone(),
        parameters: params,
        budget,
        low_t_o1: o1,
        bridging_bound: a * rho * beta.powf(-1.5),
        bridging_term: correction - main,
        note: DISCLAIMER.to_string(),
    })
}
