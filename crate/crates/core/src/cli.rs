//! Command-line front end.
//!
//! Every command writes one artifact (CSV or JSON) to `--out`, or to stdout when
//! no path is given, and echoes a one-line summary. Units are `hbar = 2m = 1`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::{lower_bound, BoundConfig, BoundReport, Branch, A_MIN, B_MIN, DEFAULT_DELTA};
use crate::error::{Error, Result};
use crate::ideal_gas::IdealGasPoint;
use crate::kernels::decay::{decay_bound_check, DecayReport, ProductBump};
use crate::kernels::dyson::{certify_dyson, random_scatterers, DysonCertificate, DysonCheckConfig, UChoice};
use crate::kernels::eigen::LanczosOptions;
use crate::kernels::fields::{build_f_r, build_h, build_w_r, CutoffProfile};
use crate::kernels::hole::{verify_hole_lemma, HoleLemmaReport};
use crate::kernels::io::{write_atomic, write_field, Verdict};
use crate::kernels::lattice::Lattice;
use crate::potentials::{truncate, truncate_shell, PairPotential, PotentialKind, RadialPotential, TruncatedPotential};
use crate::scattering::{
    attractive_well_a, default_r_max, hard_sphere_truncated_a, scattering_length_ode, scattering_length_variational,
    Method, ScatteringSolution,
};

const UNITS: &str = "# units: hbar = 2m = 1 (energy p^2, temperature T = 1/beta, lengths in the potential's units)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Thermodynamics of the dilute Bose gas (units hbar = 2m = 1).
#[derive(Debug, Clone, Parser)]
#[command(name = "bose-thermo", version, allow_negative_numbers = true)]
pub struct RunConfig {
    /// Seed for randomised checks (scatterer placement); recorded in the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for sweeps and multi-configuration checks.
    #[arg(long, global = true, env = "BOSE_THERMO_JOBS")]
    pub jobs: Option<usize>,
    /// Output file; written atomically. Stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; CSV for `ideal` and `sweep`, JSON otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Scattering length of a potential given as JSON.
    Scattering(ScatteringArgs),
    /// Truncate a potential to moment 2 phi and report its scattering length.
    Truncate(TruncateArgs),
    /// Ideal-gas table. CSV columns: T, rho, mu0, f0, cV, condensate.
    Ideal(IdealArgs),
    /// Lower-bound report at one state point.
    Bound(BoundArgs),
    /// Lattice certification of an operator inequality.
    KernelsVerify(KernelsArgs),
    /// Lower bound along a log grid of scattering lengths.
    /// CSV columns: x, a, branch, error_factor, lower_bound.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ode,
    Variational,
    ClosedForm,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct ScatteringArgs {
    #[arg(long)]
    pub potential: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Ode)]
    pub method: MethodArg,
    /// Outer radius of the ODE integration (default 5 max(R0, 1)).
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Radius R of the variational ball (default 4 R0).
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 4096)]
    pub mesh: usize,
    /// Truncation level phi; with `closed-form` on a hard core, the truncated value.
    #[arg(long)]
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct TruncateArgs {
    #[arg(long)]
    pub potential: PathBuf,
    #[arg(long)]
    pub phi: f64,
    /// Use the shell construction for a hard core.
    #[arg(long)]
    pub shell: bool,
    /// Shell width parameter (default sqrt(a/phi)).
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct IdealArgs {
    #[arg(long)]
    pub beta: f64,
    /// Densities as `start:stop:count`, inclusive and evenly spaced.
    #[arg(long)]
    pub rho_grid: String,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct BoundArgs {
    /// Scattering length; computed from `--potential` when absent.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub rho: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = A_MIN)]
    pub a_exp: f64,
    #[arg(long, default_value_t = B_MIN)]
    pub b_exp: f64,
    /// Potential JSON; sets a, the range R0 and, with `--phi`, the truncated length.
    #[arg(long)]
    pub potential: Option<PathBuf>,
    #[arg(long)]
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub rho: f64,
    /// Scattering lengths as `start:stop:count`, log-spaced.
    #[arg(long)]
    pub a_grid: String,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct KernelsArgs {
    #[command(subcommand)]
    pub check: KernelsCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpArg {
    Smooth,
    Polynomial,
}

#[derive(Debug, Clone, Subcommand)]
#[command(allow_negative_numbers = true)]
pub enum KernelsCheck {
    /// Dyson-type inequality for a truncated hard sphere around lattice scatterers.
    Dyson {
        #[arg(long, default_value_t = 32.0)]
        box_l: f64,
        /// Grid sizes of the refinement sequence, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [16usize, 24, 32])]
        grids: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        scatterers: usize,
        /// Hard-sphere radius before truncation.
        #[arg(long, default_value_t = 4.0)]
        a: f64,
        #[arg(long, default_value_t = 40.0)]
        phi: f64,
        #[arg(long, default_value_t = 8.0)]
        r: f64,
        #[arg(long, default_value_t = 8.0)]
        s: f64,
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        kappa: f64,
        #[arg(long, value_enum, default_value_t = UArg::HatWithHole)]
        u_choice: UArg,
        /// Directory for binary dumps of h, f_R and w_R on the finest grid.
        #[arg(long)]
        dump_fields: Option<PathBuf>,
    },
    /// Radial hole-lemma form.
    Hole {
        #[arg(long, default_value_t = 0.05)]
        r0: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = PI / 4.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1024)]
        mesh: usize,
    },
    /// Decay bound for the transform of a compactly supported profile. The
    /// verdict's `eigenvalue` field carries the minimum relative margin.
    Decay {
        #[arg(long, default_value_t = 8.0)]
        s: f64,
        #[arg(long, default_value_t = 128.0)]
        box_l: f64,
        #[arg(long, default_value_t = 128)]
        grid_n: usize,
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, value_enum, default_value_t = BumpArg::Smooth)]
        bump: BumpArg,
        #[arg(long, default_value_t = 8)]
        power: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UArg {
    Hat,
    HatWithHole,
}

/// Artifact and summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifact: String,
    pub summary: String,
}

/// Output of `truncate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub potential: TruncatedPotential,
    pub moment: f64,
    pub a: f64,
    pub a_tilde: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub a: f64,
    pub branch: Branch,
    pub error_factor: f64,
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DysonRunConfig {
    pub seed: u64,
    pub hard_sphere_a: f64,
    pub phi: f64,
    pub s: f64,
    pub grids: Vec<usize>,
    pub check: DysonCheckConfig,
    pub certificate: DysonCertificate,
}

/// Parses `start:stop:count`.
pub fn parse_grid(spec: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Parse(format!("grid `{spec}` is not of the form start:stop:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    Ok((start, stop, count))
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    (0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect()
}

fn logspace(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > 0.0) {
        return Err(Error::domain("log grid endpoints must be positive"));
    }
    Ok(linspace(start.ln(), stop.ln(), count).into_iter().map(f64::exp).collect())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::numerical(format!("cannot start worker pool: {e}")))
}

fn scattering(args: &ScatteringArgs) -> Result<(ScatteringSolution, String)> {
    let p = RadialPotential::from_path(&args.potential)?;
    let sol = match args.method {
        MethodArg::Ode => scattering_length_ode(&p, args.r_max.unwrap_or_else(|| default_r_max(&p)), 64)?,
        MethodArg::Variational => {
            let radius = args.radius.unwrap_or(4.0 * p.range().max(1e-12));
            scattering_length_variational(&p, radius, args.mesh)?
        }
        MethodArg::ClosedForm => {
            let a = match (p.kind(), args.phi) {
                (PotentialKind::HardCore { radius }, Some(phi)) => hard_sphere_truncated_a(*radius, phi)?,
                (PotentialKind::HardCore { radius }, None) => *radius,
                (PotentialKind::AttractiveWell { lambda }, _) => attractive_well_a(*lambda, p.range())?,
                _ => {
                    return Err(Error::domain(
                        "closed form exists only for a hard core (optionally with --phi) or an attractive well",
                    ))
                }
            };
            ScatteringSolution {
                a,
                method: Method::ClosedForm,
                profile: Vec::new(),
                tail_slope: 1.0,
                tail_fit_residual: 0.0,
            }
        }
    };
    let summary = format!("a = {} (method {:?}, tail-fit residual {:e})", sol.a, sol.method, sol.tail_fit_residual);
    Ok((sol, summary))
}

fn truncation(args: &TruncateArgs) -> Result<(TruncationReport, String)> {
    let p = RadialPotential::from_path(&args.potential)?;
    let t = if args.shell { truncate_shell(&p, args.phi, args.epsilon)? } else { truncate(&p, args.phi)? };
    let a = scattering_length_ode(&p, default_r_max(&p), 16)?.a;
    let a_tilde = scattering_length_ode(&t, default_r_max(&t), 16)?.a;
    let report = TruncationReport { moment: t.moment()?, potential: t, a, a_tilde };
    let summary = format!("a = {a}, truncated a = {a_tilde}, moment = {}", report.moment);
    Ok((report, summary))
}

fn ideal_rows(args: &IdealArgs) -> Result<Vec<IdealGasPoint>> {
    let (start, stop, count) = parse_grid(&args.rho_grid)?;
    linspace(start, stop, count).into_iter().map(|rho| IdealGasPoint::new(args.beta, rho)).collect()
}

fn ideal_csv(rows: &[IdealGasPoint]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{UNITS}; cV per unit volume; condensate = max(rho - rho_c, 0)");
    s.push_str("T,rho,mu0,f0,cV,condensate\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{},{}", r.temperature(), r.rho, r.mu0, r.f0, r.specific_heat, r.condensate);
    }
    s
}

fn bound_config(args: &BoundArgs) -> Result<BoundConfig> {
    let mut a = args.a;
    let mut a_tilde = None;
    let mut r0 = None;
    if let Some(path) = &args.potential {
        let p = RadialPotential::from_path(path)?;
        let a_v = scattering_length_ode(&p, default_r_max(&p), 16)?.a;
        a.get_or_insert(a_v);
        r0 = Some(p.range());
        if let Some(phi) = args.phi {
            let t = truncate(&p, phi)?;
            a_tilde = Some(scattering_length_ode(&t, default_r_max(&t), 16)?.a);
        }
    }
    let a = a.ok_or_else(|| Error::domain("give --a or --potential"))?;
    let mut cfg = BoundConfig::new(a, args.beta, args.rho).with_delta(args.delta);
    cfg.a_exp = args.a_exp;
    cfg.b_exp = args.b_exp;
    cfg.a_tilde = a_tilde;
    cfg.r0 = r0;
    Ok(cfg)
}

fn sweep_rows(args: &SweepArgs, jobs: Option<usize>) -> Result<Vec<SweepRow>> {
    let (start, stop, count) = parse_grid(&args.a_grid)?;
    let grid = logspace(start, stop, count)?;
    let rows: Vec<Result<SweepRow>> = pool(jobs)?.install(|| {
        grid.par_iter()
            .map(|&a| {
                let rep = lower_bound(&BoundConfig::new(a, args.beta, args.rho).with_delta(args.delta))?;
                Ok(SweepRow {
                    x: a * args.rho * args.rho * args.beta.powf(2.5),
                    a,
                    branch: rep.branch,
                    error_factor: rep.error_factor,
                    lower_bound: rep.lower_bound,
                })
            })
            .collect()
    });
    rows.into_iter().collect()
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{UNITS}; x = a rho^2 beta^(5/2); error factors use unit constants (illustrative)");
    s.push_str("x,a,branch,error_factor,lower_bound\n");
    for r in rows {
        let branch = match r.branch {
            Branch::HighT => "high_t",
            Branch::LowT => "low_t",
        };
        let _ = writeln!(s, "{},{},{},{},{}", r.x, r.a, branch, r.error_factor, r.lower_bound);
    }
    s
}

fn kernels(check: &KernelsCheck, seed: u64) -> Result<(String, String)> {
    match check {
        KernelsCheck::Dyson { box_l, grids, scatterers, a, phi, r, s, epsilon, kappa, u_choice, dump_fields } => {
            let potential = truncate(&RadialPotential::hard_core(*a)?, *phi)?;
            let points = random_scatterers(*scatterers, *box_l, 8, r / 5.0, seed)?;
            let cfg = DysonCheckConfig {
                scatterers: points,
                r: *r,
                epsilon: *epsilon,
                kappa: *kappa,
                u_choice: match u_choice {
                    UArg::Hat => UChoice::Hat,
                    UArg::HatWithHole => UChoice::HatWithHole,
                },
            };
            let cutoff = CutoffProfile::new(*s)?;
            let opts = LanczosOptions { seed, ..LanczosOptions::default() };
            let cert = certify_dyson(&cfg, &potential, &cutoff, *box_l, grids, &opts)?;
            if let Some(dir) = dump_fields {
                std::fs::create_dir_all(dir)?;
                let finest = *grids.iter().max().expect("certify_dyson checked the grid list");
                let h = build_h(&Lattice::new(*box_l, finest)?, &cutoff)?;
                let f_r = build_f_r(&h, *r)?;
                write_field(&h, &dir.join("h.bin"))?;
                write_field(&f_r, &dir.join("f_r.bin"))?;
                write_field(&build_w_r(&f_r), &dir.join("w_r.bin"))?;
            }
            let summary = format!(
                "dyson: eigenvalue {:e}, tol_disc {:e}, {} ({} scatterers, seed {seed})",
                cert.eigenvalue,
                cert.tol_disc,
                if cert.holds { "holds" } else { "violated" },
                scatterers
            );
            let verdict = Verdict {
                inequality: "p chi^2 p + 1/2 sum v~ >= (1-eps) a~ U_R(nearest) - sum (a~/eps) w_R".to_string(),
                eigenvalue: cert.eigenvalue,
                tol_disc: cert.tol_disc,
                holds: cert.holds,
                config: DysonRunConfig {
                    seed,
                    hard_sphere_a: *a,
                    phi: *phi,
                    s: *s,
                    grids: grids.clone(),
                    check: cfg,
                    certificate: cert,
                },
            };
            Ok((json(&verdict)?, summary))
        }
        KernelsCheck::Hole { r0, r, lambda, mesh } => {
            let rep: HoleLemmaReport = verify_hole_lemma(*r0, *r, *lambda, *mesh)?;
            let summary = format!(
                "hole: eigenvalue {:e}, tol_disc {:e}, {}",
                rep.eigenvalue,
                rep.tol_disc,
                if rep.holds { "holds" } else { "violated" }
            );
            let verdict = Verdict {
                inequality: "int |grad phi|^2 - (lambda/R0)^2 int_{R0} phi^2 >= -c int phi^2 on the ball R/10"
                    .to_string(),
                eigenvalue: rep.eigenvalue,
                tol_disc: rep.tol_disc,
                holds: rep.holds,
                config: rep,
            };
            Ok((json(&verdict)?, summary))
        }
        KernelsCheck::Decay { s, box_l, grid_n, n, bump, power } => {
            let o = match bump {
                BumpArg::Smooth => ProductBump::Smooth,
                BumpArg::Polynomial => ProductBump::Polynomial { power: *power },
            };
            let rep: DecayReport = decay_bound_check(&o, *s, &Lattice::new(*box_l, *grid_n)?, *n)?;
            let summary = format!(
                "decay n = {n}: minimum margin {:e}, slope {:.3}, {}",
                rep.min_margin,
                rep.slope,
                if rep.holds { "holds" } else { "violated" }
            );
            let verdict = Verdict {
                inequality: "|u(x)| <= (s/(16 d))^(2n) |(-Delta)^n o|_inf (2/(pi s) + 2(n+1)/L)^3; value is the minimum relative margin".to_string(),
                eigenvalue: rep.min_margin,
                tol_disc: 0.0,
                holds: rep.holds,
                config: (o, rep),
            };
            Ok((json(&verdict)?, summary))
        }
    }
}

/// Executes one command and returns its artifact and summary without writing anything.
pub fn execute(config: &RunConfig) -> Result<Outcome> {
    let fmt = |default: Format| config.format.unwrap_or(default);
    let (artifact, summary) = match &config.command {
        Command::Scattering(args) => {
            let (sol, summary) = scattering(args)?;
            match fmt(Format::Json) {
                Format::Json => (json(&sol)?, summary),
                Format::Csv => {
                    let mut s = format!("{UNITS}; u = r phi(r)\nr,u\n");
                    for p in &sol.profile {
                        let _ = writeln!(s, "{},{}", p.r, p.u);
                    }
                    (s, summary)
                }
            }
        }
        Command::Truncate(args) => {
            let (rep, summary) = truncation(args)?;
            (json(&rep)?, summary)
        }
        Command::Ideal(args) => {
            let rows = ideal_rows(args)?;
            let summary = format!("{} rows at beta = {}", rows.len(), args.beta);
            match fmt(Format::Csv) {
                Format::Csv => (ideal_csv(&rows), summary),
                Format::Json => (json(&rows)?, summary),
            }
        }
        Command::Bound(args) => {
            let rep: BoundReport = lower_bound(&bound_config(args)?)?;
            let summary = format!(
                "lower bound {} (f0 {} + correction {}), branch {:?}, error factor {:e}",
                rep.lower_bound, rep.f0_term, rep.correction, rep.branch, rep.error_factor
            );
            (json(&rep)?, summary)
        }
        Command::KernelsVerify(args) => kernels(&args.check, config.seed)?,
        Command::Sweep(args) => {
            let rows = sweep_rows(args, config.jobs)?;
            let summary = format!("{} sweep points at beta = {}, rho = {}", rows.len(), args.beta, args.rho);
            match fmt(Format::Csv) {
                Format::Csv => (sweep_csv(&rows), summary),
                Format::Json => (json(&rows)?, summary),
            }
        }
    };
    Ok(Outcome { artifact, summary })
}

/// Executes the command and writes its artifact; returns the summary line.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    let outcome = execute(config)?;
    if let Some(path) = &config.out {
        write_atomic(path, outcome.artifact.as_bytes())?;
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse() {
        assert_eq!(parse_grid("0.01:0.2:40").unwrap(), (0.01, 0.2, 40));
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("1:2:0").is_err());
        let g = linspace(0.01, 0.2, 40);
        assert_eq!(g.len(), 40);
        assert_eq!(g[39], 0.2);
        let l = logspace(1e-8, 1e-2, 4).unwrap();
        assert!((l[1] / 1e-6 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parses_flags() {
        let c =
            RunConfig::try_parse_from(["bose-thermo", "ideal", "--beta", "1", "--rho-grid", "0.01:0.2:40"]).unwrap();
        assert_eq!(c.seed, 0);
        assert!(matches!(c.command, Command::Ideal(_)));
        let c = RunConfig::try_parse_from(["bose-thermo", "--seed", "3", "kernels-verify", "hole", "--mesh", "512"])
            .unwrap();
        assert_eq!(c.seed, 3);
    }
}
