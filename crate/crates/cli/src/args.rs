use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conic_alm::cccp::{AlmConfig, CriterionMode, InnerRule, SigmaSchedule};
use conic_alm::instances::InstanceManifest;

/// Default cap of a geometric penalty schedule.
const SIGMA_MAX: f64 = 1e8;

#[derive(Debug, Parser)]
#[command(name = "conic-alm", version, about = "Augmented Lagrangian solver for convex composite conic programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the 2x2 SDP example with the first-order inner solver.
    Example1 {
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve an H-weighted nearest correlation matrix problem with Newton-CG inner solves.
    Ncm {
        /// Random instance `n,seed,missing_fraction`.
        #[arg(long, value_parser = parse_random, conflicts_with = "instance", required_unless_present = "instance")]
        random: Option<RandomSpec>,
        /// Instance manifest (kind = ncm or qsdp-file).
        #[arg(long)]
        instance: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve any instance described by a manifest.
    Solve {
        manifest: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    pub seed: u64,
    pub missing_fraction: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Criteria,
    Tight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// First test only.
    A,
    /// Both tests.
    Ab,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Default, Args)]
pub struct SolverArgs {
    /// Penalty schedule: `fixed:<v>` or `geometric:<sigma0>,<rho>[,<sigma_max>]`.
    #[arg(long, value_parser = parse_sigma)]
    pub sigma: Option<SigmaSchedule>,
    /// Outer tolerance on the KKT residual norm.
    #[arg(long, value_parser = parse_positive)]
    pub tol: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub max_outer: Option<usize>,
    /// Inner iteration budget per outer step.
    #[arg(long, value_parser = parse_count)]
    pub inner_budget: Option<usize>,
    #[arg(long, value_enum)]
    pub inner_rule: Option<RuleArg>,
    /// Absolute inner tolerance (raised to the rounding floor when smaller).
    #[arg(long, value_parser = parse_nonnegative)]
    pub inner_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Iteration history output; format follows the extension unless `--format` is given.
    #[arg(long)]
    pub history: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// JSON summary with the rate report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn parse_sigma(s: &str) -> Result<SigmaSchedule, String> {
    let bad = || format!("expected fixed:<v> or geometric:<sigma0>,<rho>[,<sigma_max>], got '{s}'");
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    let nums: Vec<f64> =
        rest.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let schedule = match (kind, nums.as_slice()) {
        ("fixed", [v]) => SigmaSchedule::Fixed(*v),
        ("geometric", [s0, rho]) => SigmaSchedule::Geometric { sigma0: *s0, rho: *rho, sigma_max: SIGMA_MAX.max(*s0) },
        ("geometric", [s0, rho, max]) => SigmaSchedule::Geometric { sigma0: *s0, rho: *rho, sigma_max: *max },
        _ => return Err(bad()),
    };
    let ok = match schedule {
        SigmaSchedule::Fixed(v) => v > 0.0 && v.is_finite(),
        SigmaSchedule::Geometric { sigma0, rho, sigma_max } => {
            sigma0 > 0.0 && sigma0.is_finite() && rho >= 1.0 && rho.is_finite() && sigma_max >= sigma0
        }
    };
    if ok {
        Ok(schedule)
    } else {
        Err(format!("penalty values must be positive and finite with rho >= 1, got '{s}'"))
    }
}

pub fn parse_random(s: &str) -> Result<RandomSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || format!("expected n,seed,missing_fraction, got '{s}'");
    if parts.len() != 3 {
        return Err(bad());
    }
    let spec = RandomSpec {
        n: parts[0].parse().map_err(|_| bad())?,
        seed: parts[1].parse().map_err(|_| bad())?,
        missing_fraction: parts[2].parse().map_err(|_| bad())?,
    };
    if spec.n == 0 || !(0.0..1.0).contains(&spec.missing_fraction) {
        return Err(format!("need n >= 1 and 0 <= missing_fraction < 1, got '{s}'"));
    }
    Ok(spec)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

fn parse_nonnegative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a nonnegative number, got '{s}'")),
    }
}

fn parse_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("expected a positive integer, got '{s}'")),
    }
}

fn parse_rule(s: &str) -> Result<RuleArg, String> {
    RuleArg::from_str(s, true)
}

fn parse_mode(s: &str) -> Result<ModeArg, String> {
    ModeArg::from_str(s, true)
}

/// Solver settings a manifest may carry, with the same syntax as the flags.
fn manifest_args(mf: &InstanceManifest) -> Result<SolverArgs, String> {
    fn field<T>(
        mf: &InstanceManifest,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, String> {
        mf.get(key).map(|v| parse(v).map_err(|e| format!("{}: field '{key}': {e}", mf.path().display()))).transpose()
    }
    Ok(SolverArgs {
        sigma: field(mf, "sigma", parse_sigma)?,
        tol: field(mf, "tol", parse_positive)?,
        max_outer: field(mf, "max_outer", parse_count)?,
        inner_budget: field(mf, "inner_budget", parse_count)?,
        inner_rule: field(mf, "inner_rule", parse_rule)?,
        inner_tol: field(mf, "inner_tol", parse_nonnegative)?,
        mode: field(mf, "mode", parse_mode)?,
        ..SolverArgs::default()
    })
}

impl SolverArgs {
    /// Flags over manifest over `defaults`.
    pub fn resolve(&self, manifest: Option<&InstanceManifest>, defaults: AlmConfig) -> Result<AlmConfig, String> {
        let from_file = match manifest {
            Some(mf) => manifest_args(mf)?,
            None => SolverArgs::default(),
        };
        let mut cfg = defaults;
        for layer in [&from_file, self] {
            if let Some(s) = layer.sigma {
                cfg.sigma = s;
            }
            if let Some(t) = layer.tol {
                cfg.tol = t;
            }
            if let Some(m) = layer.max_outer {
                cfg.max_outer = m;
            }
            if let Some(b) = layer.inner_budget {
                cfg.inner_budget = b;
            }
            if let Some(r) = layer.inner_rule {
                cfg.inner_rule = match r {
                    RuleArg::Criteria => InnerRule::Criteria,
                    RuleArg::Tight => InnerRule::Tight,
                };
            }
            if let Some(t) = layer.inner_tol {
                cfg.inner_tol = t;
            }
            if let Some(m) = layer.mode {
                cfg.mode = match m {
                    ModeArg::A => CriterionMode::AOnly,
                    ModeArg::Ab => CriterionMode::AAndB,
                };
            }
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn history_format(&self) -> FormatArg {
        self.format.unwrap_or_else(|| match &self.history {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => FormatArg::Json,
            _ => FormatArg::Csv,
        })
    }
}
