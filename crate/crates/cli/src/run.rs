use std::fs;
use std::path::Path;

use anyhow::Context;
use conic_alm::cccp::{alm_solve, AlmConfig, ApgSolver, CccpError, DenseCccp, Oracle, Termination};
use conic_alm::diagnostics::{fit_linear_rate, history_csv, history_json, IterationRecord};
use conic_alm::instances::{
    build_example1, build_ncm, example1_oracle, example2_dual_distance, gen_random_ncm, load_instance, Instance,
    InstanceError, InstanceKind, InstanceManifest,
};
use conic_alm::matcone::{sym_eigen, SymMatrix};
use conic_alm::qsdp::{qsdp_alm_solve, EMap, NewtonConfig, QsdpData, QsdpError};
use serde_json::{json, Map, Value};

use crate::args::{Command, FormatArg, SolverArgs};

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Converged = 0,
    Usage = 1,
    Budget = 2,
    Numerical = 3,
}

/// An error paired with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure { exit: Exit::Usage, error: error.into() }
    }

    fn numerical(error: impl Into<anyhow::Error>) -> Self {
        Failure { exit: Exit::Numerical, error: error.into() }
    }
}

fn from_cccp(e: CccpError) -> Failure {
    match e {
        CccpError::InvalidConfig(_) | CccpError::InvalidProblem(_) | CccpError::DimensionMismatch { .. } => {
            Failure::usage(e)
        }
        other => Failure::numerical(other),
    }
}

fn from_qsdp(e: QsdpError) -> Failure {
    match e {
        QsdpError::Cccp(inner) => from_cccp(inner),
        QsdpError::InvalidData(_) => Failure::usage(e),
        other => Failure::numerical(other),
    }
}

fn from_instance(e: InstanceError) -> Failure {
    match e {
        InstanceError::Qsdp(inner) => from_qsdp(inner),
        InstanceError::Cccp(inner) => from_cccp(inner),
        other => Failure::usage(other),
    }
}

/// For quadratic SDPs the inner budget counts Newton steps.
fn qsdp_defaults() -> AlmConfig {
    AlmConfig { inner_budget: NewtonConfig::default().max_iters, ..AlmConfig::default() }
}

pub fn run(command: Command) -> Result<Exit, Failure> {
    match command {
        Command::Example1 { solver } => {
            let cfg = solver.resolve(None, AlmConfig::default()).map_err(|e| Failure::usage(anyhow::anyhow!(e)))?;
            solve_cccp(&build_example1(), &cfg, &example1_oracle(), &solver, Map::new(), None)
        }
        Command::Ncm { random, instance, solver } => {
            let (manifest, q) = match (random, instance) {
                (Some(r), _) => {
                    let (g, mask) = gen_random_ncm(r.n, r.seed, r.missing_fraction).map_err(from_instance)?;
                    (None, build_ncm(&g, &mask).map_err(from_instance)?)
                }
                (None, Some(path)) => match load_instance(&path).map_err(from_instance)? {
                    (mf, Instance::Qsdp(q)) => (Some(mf), q),
                    (mf, Instance::Cccp(_)) => {
                        return Err(Failure::usage(anyhow::anyhow!(
                            "{}: kind '{}' is not a quadratic SDP; use the solve command",
                            path.display(),
                            mf.kind().name()
                        )))
                    }
                },
                (None, None) => {
                    return Err(Failure::usage(anyhow::anyhow!("one of --random or --instance is required")))
                }
            };
            let cfg =
                solver.resolve(manifest.as_ref(), qsdp_defaults()).map_err(|e| Failure::usage(anyhow::anyhow!(e)))?;
            solve_qsdp(&q, &cfg, &solver)
        }
        Command::Solve { manifest, solver } => {
            let (mf, inst) = load_instance(&manifest).map_err(from_instance)?;
            let defaults = match inst {
                Instance::Qsdp(_) => qsdp_defaults(),
                Instance::Cccp(_) => AlmConfig::default(),
            };
            let cfg = solver.resolve(Some(&mf), defaults).map_err(|e| Failure::usage(anyhow::anyhow!(e)))?;
            match inst {
                Instance::Qsdp(q) => solve_qsdp(&q, &cfg, &solver),
                Instance::Cccp(p) => {
                    let oracle = match mf.kind() {
                        InstanceKind::Example1 => example1_oracle(),
                        _ => Oracle::default(),
                    };
                    solve_cccp(&p, &cfg, &oracle, &solver, Map::new(), Some(&mf))
                }
            }
        }
    }
}

fn solve_cccp(
    p: &DenseCccp,
    cfg: &AlmConfig,
    oracle: &Oracle,
    args: &SolverArgs,
    mut extra: Map<String, Value>,
    manifest: Option<&InstanceManifest>,
) -> Result<Exit, Failure> {
    let res = alm_solve(p, cfg, &mut ApgSolver::default(), oracle).map_err(from_cccp)?;
    if manifest.is_some_and(|m| m.kind() == InstanceKind::Example2) {
        let d = example2_dual_distance(&res.y);
        println!("dual distance to solution set: {d:e}");
        extra.insert("dual_solution_set_distance".into(), json!(d));
    }
    extra.insert("x".into(), json!(res.x.as_slice()));
    extra.insert("y".into(), json!(res.y.as_slice()));
    finish(&res.history, &res.termination, args, extra)
}

fn solve_qsdp(q: &QsdpData, cfg: &AlmConfig, args: &SolverArgs) -> Result<Exit, Failure> {
    let ncfg = NewtonConfig { max_iters: cfg.inner_budget, ..NewtonConfig::default() };
    let res = qsdp_alm_solve(q, cfg, &ncfg, &Oracle::default()).map_err(from_qsdp)?;
    let lmin = sym_eigen(&SymMatrix::symmetrized(res.x.clone())).map_err(Failure::numerical)?.values[0];
    let mut extra = Map::new();
    if *q.e() == EMap::Diagonal {
        let dev = res.x.diagonal().iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
        println!("max |X_ii - 1|: {dev:e}");
        extra.insert("max_diag_deviation".into(), json!(dev));
    }
    println!("lambda_min(X): {lmin:e}");
    extra.insert("lambda_min".into(), json!(lmin));
    finish(&res.history, &res.termination, args, extra)
}

fn finish(
    history: &[IterationRecord],
    termination: &Termination,
    args: &SolverArgs,
    mut extra: Map<String, Value>,
) -> Result<Exit, Failure> {
    if let Some(path) = &args.history {
        let text = match args.history_format() {
            FormatArg::Csv => history_csv(history),
            FormatArg::Json => history_json(history),
        };
        write(path, &text)?;
    }
    let (label, exit) = match termination {
        Termination::Converged => ("converged".to_string(), Exit::Converged),
        Termination::MaxOuter => ("outer iteration budget exhausted".to_string(), Exit::Budget),
        Termination::InnerFailure { k, reason } => (format!("inner solve {k} failed: {reason}"), Exit::Budget),
    };
    println!("termination: {label}");
    println!("outer iterations: {}", history.len());
    let residuals: Vec<f64> = history.iter().map(|r| r.kkt_res).collect();
    if let Some(last) = residuals.last() {
        println!("final kkt residual: {last:e}");
    }
    let rate = fit_linear_rate(&residuals, None).ok();
    match &rate {
        Some(r) => {
            println!("fitted rate: {:.4e} (window from k = {})", r.rate, r.window_start);
            let tail: Vec<String> = r.ratios.iter().rev().take(3).rev().map(|v| format!("{v:.3e}")).collect();
            println!("last ratios: {}", tail.join(" "));
            println!("superlinear: {}", r.superlinear);
        }
        None => println!("fitted rate: n/a (history too short)"),
    }
    if let Some(path) = &args.report {
        extra.insert("termination".into(), json!(label));
        extra.insert("outer_iterations".into(), json!(history.len()));
        extra.insert("final_kkt_res".into(), json!(residuals.last()));
        extra.insert("rate_report".into(), serde_json::to_value(&rate).map_err(Failure::numerical)?);
        let text = serde_json::to_string_pretty(&Value::Object(extra)).map_err(Failure::numerical)?;
        write(path, &(text + "\n"))?;
    }
    Ok(exit)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display())).map_err(Failure::usage)
}
