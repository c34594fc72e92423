//! Radial pair potentials and their truncation to finite `∫ r^2 v`.
//!
//! Hard cores are stored as `f64::INFINITY`; arithmetic with them is confined
//! to [`cumulative_tail`] and the truncation constructors below.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::Quadrature;

/// Common interface of everything the scattering solvers and lattice checks
/// can consume.
pub trait PairPotential {
    /// `v(r)` for `r >= 0`; `+inf` inside a hard core.
    fn value(&self, r: f64) -> f64;
    /// Range `R_0`: `v(r) = 0` for `r > R_0`.
    fn range(&self) -> f64;
    /// Radius of the hard core at the origin, if any.
    fn hard_core_radius(&self) -> Option<f64> {
        None
    }
    /// Points in `[0, R_0]` where `v` jumps or has a kink, sorted ascending.
    fn breakpoints(&self) -> Vec<f64>;
    fn is_nonnegative(&self) -> bool;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum PotentialKind {
    /// `v = +inf` for `r <= radius`.
    HardCore { radius: f64 },
    /// `v = height` for `r <= width`.
    Step { height: f64, width: f64 },
    /// Piecewise-linear interpolation of samples; constant `v[0]` below `r[0]`, zero past the last sample.
    Tabulated { r: Vec<f64>, v: Vec<f64> },
    /// `v = -2 lambda^2 / R_0^2` for `r <= R_0`. Only meaningful for its closed-form scattering length.
    AttractiveWell { lambda: f64 },
}

/// A radial pair potential with finite range. Construct through [`RadialPotential::new`]
/// or the kind-specific helpers so that the invariants are checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialSpec", into = "PotentialSpec")]
pub struct RadialPotential {
    kind: PotentialKind,
    range: f64,
}

/// On-disk form: `{"kind": ..., "R0": ..., "params": {...}}`. `R0` may be
/// omitted except for the attractive well; it then defaults to the hard-core
/// radius, the step width, or the last tabulated radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PotentialSpec {
    #[serde(flatten)]
    kind: PotentialKind,
    #[serde(rename = "R0", default)]
    range: Option<f64>,
}

impl TryFrom<PotentialSpec> for RadialPotential {
    type Error = Error;
    fn try_from(spec: PotentialSpec) -> Result<Self> {
        let range = match (spec.range, &spec.kind) {
            (Some(r), _) => r,
            (None, PotentialKind::HardCore { radius }) => *radius,
            (None, PotentialKind::Step { width, .. }) => *width,
            (None, PotentialKind::Tabulated { r, .. }) => r.last().copied().unwrap_or(0.0),
            (None, PotentialKind::AttractiveWell { .. }) => {
                return Err(Error::domain("attractive well needs an explicit R0"));
            }
        };
        RadialPotential::new(spec.kind, range)
    }
}

impl From<RadialPotential> for PotentialSpec {
    fn from(p: RadialPotential) -> Self {
        PotentialSpec { kind: p.kind, range: Some(p.range) }
    }
}

impl RadialPotential {
    pub fn new(kind: PotentialKind, range: f64) -> Result<Self> {
        if !(range >= 0.0 && range.is_finite()) {
            return Err(Error::domain(format!("range R0 = {range} must be finite and >= 0")));
        }
        match &kind {
            PotentialKind::HardCore { radius } => {
                if !(*radius > 0.0) || *radius > range {
                    return Err(Error::domain(format!(
                        "hard core radius {radius} must be positive and <= R0 = {range}"
                    )));
                }
            }
            PotentialKind::Step { height, width } => {
                if !(*height >= 0.0 && height.is_finite()) {
                    return Err(Error::domain(format!("step height {height} must be finite and >= 0")));
                }
                if !(*width >= 0.0) || *width > range {
                    return Err(Error::domain(format!("step width {width} must lie in [0, R0 = {range}]")));
                }
            }
            PotentialKind::Tabulated { r, v } => {
                if r.len() != v.len() || r.len() < 2 {
                    return Err(Error::domain("tabulated potential needs matching r and v with >= 2 samples"));
                }
                if r[0] < 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::domain("tabulated r must be non-negative and strictly increasing"));
                }
                if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                    return Err(Error::domain(format!("tabulated v must be finite and >= 0, found {bad}")));
                }
                if r.iter().zip(v).any(|(ri, vi)| *ri > range && *vi != 0.0) {
                    return Err(Error::domain(format!("tabulated v is non-zero beyond R0 = {range}")));
                }
                if *v.last().unwrap() != 0.0 && *r.last().unwrap() != range {
                    return Err(Error::domain("last tabulated sample must be zero or sit at R0"));
                }
            }
            PotentialKind::AttractiveWell { lambda } => {
                if !(0.0..std::f64::consts::FRAC_PI_2).contains(lambda) {
                    return Err(Error::domain(format!("well parameter lambda = {lambda} must lie in [0, pi/2)")));
                }
                if !(range > 0.0) {
                    return Err(Error::domain("attractive well needs R0 > 0"));
                }
            }
        }
        Ok(RadialPotential { kind, range })
    }

    pub fn hard_core(radius: f64) -> Result<Self> {
        Self::new(PotentialKind::HardCore { radius }, radius)
    }

    pub fn step(height: f64, width: f64) -> Result<Self> {
        Self::new(PotentialKind::Step { height, width }, width)
    }

    pub fn tabulated(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let range = r.iter().zip(&v).rev().find(|(_, vi)| **vi != 0.0).map(|(ri, _)| *ri).unwrap_or(0.0);
        // Linear interpolation reaches zero at the next sample after the last non-zero one.
        let range = r.iter().copied().find(|ri| *ri > range).unwrap_or(range);
        Self::new(PotentialKind::Tabulated { r, v }, range)
    }

    pub fn attractive_well(lambda: f64, range: f64) -> Result<Self> {
        Self::new(PotentialKind::AttractiveWell { lambda }, range)
    }

    /// The zero potential (free scattering).
    pub fn zero() -> Self {
        RadialPotential { kind: PotentialKind::Step { height: 0.0, width: 0.0 }, range: 0.0 }
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("potential serializes")
    }
}

impl PairPotential for RadialPotential {
    fn value(&self, r: f64) -> f64 {
        if r > self.range {
            return 0.0;
        }
        match &self.kind {
            PotentialKind::HardCore { radius } => {
                if r <= *radius {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            PotentialKind::Step { height, width } => {
                if r <= *width {
                    *height
                } else {
                    0.0
                }
            }
            PotentialKind::Tabulated { r: rs, v } => interpolate(rs, v, r),
            PotentialKind::AttractiveWell { lambda } => -2.0 * lambda * lambda / (self.range * self.range),
        }
    }

    fn range(&self) -> f64 {
        self.range
    }

    fn hard_core_radius(&self) -> Option<f64> {
        match self.kind {
            PotentialKind::HardCore { radius } => Some(radius),
            _ => None,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match &self.kind {
            PotentialKind::HardCore { radius } => vec![*radius],
            PotentialKind::Step { width, .. } => vec![*width],
            PotentialKind::Tabulated { r, .. } => r.iter().copied().filter(|x| *x <= self.range).collect(),
            PotentialKind::AttractiveWell { .. } => vec![],
        };
        pts.push(self.range);
        pts.retain(|x| *x > 0.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn is_nonnegative(&self) -> bool {
        match self.kind {
            PotentialKind::AttractiveWell { lambda } => lambda == 0.0,
            _ => true,
        }
    }
}

fn interpolate(rs: &[f64], v: &[f64], r: f64) -> f64 {
    if r <= rs[0] {
        return v[0];
    }
    let last = rs.len() - 1;
    if r > rs[last] {
        return 0.0;
    }
    let i = rs.partition_point(|x| *x <= r).min(last).max(1);
    let (r0, r1) = (rs[i - 1], rs[i]);
    let t = (r - r0) / (r1 - r0);
    v[i - 1] + t * (v[i] - v[i - 1])
}

/// `v(r)` with a domain check on `r`.
pub fn eval<P: PairPotential + ?Sized>(p: &P, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!("radius r = {r} must be >= 0")));
    }
    Ok(p.value(r))
}

fn tail_quadrature() -> Quadrature {
    Quadrature::with_tolerances(1e-300, 1e-12)
}

/// `∫_s^∞ r^2 v(r) dr`; infinite when a hard core reaches past `s`.
pub fn cumulative_tail<P: PairPotential + ?Sized>(p: &P, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain(format!("lower limit s = {s} must be >= 0")));
    }
    if let Some(core) = p.hard_core_radius() {
        if s <= core {
            return Ok(f64::INFINITY);
        }
    }
    if s >= p.range() {
        return Ok(0.0);
    }
    let mut points = vec![s];
    points.extend(p.breakpoints().into_iter().filter(|x| *x > s));
    let est = tail_quadrature().integrate_pieces(|r| r * r * p.value(r), &points)?;
    Ok(est.value)
}

/// How the truncated potential was obtained from its base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum Truncation {
    /// `∫ r^2 v <= 2 phi` already; the potential is kept.
    Unchanged,
    /// `v(r) θ(r - s)` with `∫_s^∞ r^2 v = 2 phi`.
    Tail { cut_radius: f64 },
    /// Hard sphere of radius `a` replaced by the step `6 phi a^-3 θ(a - r)`.
    HardCoreStep { radius: f64, height: f64 },
    /// Shell construction: `v` for `r >= outer`, `min(v, tau)` on `[(1-eps) outer, outer)`, zero inside.
    Shell { inner: f64, outer: f64, tau: f64, epsilon: f64 },
}

/// A potential `ṽ` with `0 <= ṽ <= v` and `∫ r^2 ṽ <= 2 phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedPotential {
    pub base: RadialPotential,
    pub phi: f64,
    pub truncation: Truncation,
}

impl TruncatedPotential {
    /// Cut radius `s` (zero when nothing was removed).
    pub fn cut_radius(&self) -> f64 {
        match self.truncation {
            Truncation::Unchanged => 0.0,
            Truncation::Tail { cut_radius } => cut_radius,
            Truncation::HardCoreStep { .. } => 0.0,
            Truncation::Shell { inner, .. } => inner,
        }
    }

    pub fn tau(&self) -> Option<f64> {
        match self.truncation {
            Truncation::Shell { tau, .. } => Some(tau),
            _ => None,
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self.truncation {
            Truncation::Shell { epsilon, .. } => Some(epsilon),
            _ => None,
        }
    }

    /// `∫_0^∞ r^2 ṽ(r) dr`.
    pub fn moment(&self) -> Result<f64> {
        cumulative_tail(self, 0.0)
    }
}

impl PairPotential for TruncatedPotential {
    fn value(&self, r: f64) -> f64 {
        match self.truncation {
            Truncation::Unchanged => self.base.value(r),
            Truncation::Tail { cut_radius } => {
                if r >= cut_radius {
                    self.base.value(r)
                } else {
                    0.0
                }
            }
            Truncation::HardCoreStep { radius, height } => {
                if r <= radius {
                    height
                } else {
                    0.0
                }
            }
            Truncation::Shell { inner, outer, tau, .. } => {
                if r >= outer {
                    self.base.value(r)
                } else if r >= inner {
                    self.base.value(r).min(tau)
                } else {
                    0.0
                }
            }
        }
    }

    fn range(&self) -> f64 {
        self.base.range()
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = self.base.breakpoints();
        match self.truncation {
            Truncation::Tail { cut_radius } => pts.push(cut_radius),
            Truncation::Shell { inner, outer, .. } => {
                pts.push(inner);
                pts.push(outer);
            }
            _ => {}
        }
        pts.retain(|x| *x > 0.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn is_nonnegative(&self) -> bool {
        true
    }
}

/// Replaces `v` by a smaller potential whose `∫ r^2 ṽ` is at most `2 phi`.
///
/// * hard core of radius `a`: the explicit step `6 phi a^-3 θ(a - r)`;
/// * bounded `v` with `∫ r^2 v >= 2 phi`: `v θ(r - s)` with the cut `s` found by
///   bisection on the (continuous, decreasing) cumulative tail;
/// * otherwise `v` itself.
pub fn truncate(p: &RadialPotential, phi: f64) -> Result<TruncatedPotential> {
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(Error::domain(format!("phi = {phi} must be positive and finite")));
    }
    if !p.is_nonnegative() {
        return Err(Error::domain("truncation requires a non-negative potential"));
    }
    let budget = 2.0 * phi;
    if let Some(radius) = p.hard_core_radius() {
        let height = 6.0 * phi / radius.powi(3);
        return Ok(TruncatedPotential {
            base: p.clone(),
            phi,
            truncation: Truncation::HardCoreStep { radius, height },
        });
    }
    let total = cumulative_tail(p, 0.0)?;
    if total < budget {
        return Ok(TruncatedPotential { base: p.clone(), phi, truncation: Truncation::Unchanged });
    }
    let (mut lo, mut hi) = (0.0, p.range());
    let tol = 1e-12 * phi;
    let mut cut = 0.0;
    for _ in 0..200 {
        cut = 0.5 * (lo + hi);
        let tail = cumulative_tail(p, cut)?;
        if (tail - budget).abs() <= tol {
            break;
        }
        if tail > budget {
            lo = cut;
        } else {
            hi = cut;
        }
        if hi - lo <= f64::EPSILON * p.range() {
            break;
        }
    }
    let achieved = cumulative_tail(p, cut)?;
    if (achieved - budget).abs() > 1e-8 * phi {
        return Err(Error::Bracket(format!("cut radius bisection stalled: tail {achieved} vs budget {budget}")));
    }
    Ok(TruncatedPotential { base: p.clone(), phi, truncation: Truncation::Tail { cut_radius: cut } })
}

/// Shell construction for a hard core of radius `a`: zero inside `(1-eps) a`,
/// the constant `tau` on `[(1-eps) a, a)`, with `tau` fixed by `∫ r^2 ṽ = 2 phi`.
///
/// `epsilon = None` uses `sqrt(a / phi)`, which needs `phi > a`.
pub fn truncate_shell(p: &RadialPotential, phi: f64, epsilon: Option<f64>) -> Result<TruncatedPotential> {
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(Error::domain(format!("phi = {phi} must be positive and finite")));
    }
    let Some(outer) = p.hard_core_radius() else {
        return Err(Error::domain("the shell construction needs a hard core"));
    };
    let epsilon = epsilon.unwrap_or_else(|| (outer / phi).sqrt());
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("shell width epsilon = {epsilon} must lie in (0, 1)")));
    }
    let inner = (1.0 - epsilon) * outer;
    // Nothing of v survives beyond the core, so the whole budget goes into the shell.
    let beyond = cumulative_tail(p, outer + f64::EPSILON * outer)?;
    let missing = 2.0 * phi - beyond;
    if !(missing > 0.0) {
        return Err(Error::domain("tail beyond the core already exhausts the budget"));
    }
    let tau = 3.0 * missing / (outer.powi(3) - inner.powi(3));
    Ok(TruncatedPotential { base: p.clone(), phi, truncation: Truncation::Shell { inner, outer, tau, epsilon } })
}
