use log::{debug, info, warn};
use nalgebra::DVector;

use crate::diagnostics::{Acceptance, IterationRecord};

use super::apg::InnerSolver;
use super::criterion::criterion_check;
use super::eval::{
    aug_lagrangian_value, dual_subproblem_value, dual_update, duality_gap_bound, e_via_prox, kkt_natural_residual,
    multiplier_identity_gap,
};
use super::{CccpError, CccpProblem, Result};

/// Penalty sequence `sigma_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SigmaSchedule {
    Fixed(f64),
    /// `sigma_{k+1} = min(rho * sigma_k, sigma_max)`.
    Geometric {
        sigma0: f64,
        rho: f64,
        sigma_max: f64,
    },
}

impl SigmaSchedule {
    pub fn initial(&self) -> f64 {
        match *self {
            SigmaSchedule::Fixed(s) => s,
            SigmaSchedule::Geometric { sigma0, .. } => sigma0,
        }
    }

    pub fn next(&self, sigma: f64) -> f64 {
        match *self {
            SigmaSchedule::Fixed(s) => s,
            SigmaSchedule::Geometric { rho, sigma_max, .. } => (rho * sigma).min(sigma_max),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            SigmaSchedule::Fixed(s) => s > 0.0 && s.is_finite(),
            SigmaSchedule::Geometric { sigma0, rho, sigma_max } => {
                sigma0 > 0.0 && sigma0.is_finite() && rho >= 1.0 && rho.is_finite() && sigma_max >= sigma0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(CccpError::InvalidConfig(format!("invalid penalty schedule {self:?}")))
        }
    }
}

/// Which inexactness tests an inner solve must pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriterionMode {
    AOnly,
    AAndB,
}

/// How inner solves are terminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerRule {
    /// Criteria of the configured mode, or `||e|| <= inner_tol`, whichever comes first.
    Criteria,
    /// Only `||e|| <= inner_tol`; the criteria are still evaluated and logged.
    Tight,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlmConfig {
    pub sigma: SigmaSchedule,
    pub eps0: f64,
    pub eps_decay: f64,
    pub eta0: f64,
    pub eta_decay: f64,
    /// Outer tolerance on the KKT residual.
    pub tol: f64,
    pub max_outer: usize,
    /// Inner iteration budget per outer iteration.
    pub inner_budget: usize,
    /// Inner floor on `||e||`, raised to the rounding level when that is larger (see [`inner_floor`]).
    pub inner_tol: f64,
    pub mode: CriterionMode,
    pub inner_rule: InnerRule,
}

impl Default for AlmConfig {
    fn default() -> Self {
        AlmConfig {
            sigma: SigmaSchedule::Geometric { sigma0: 1.0, rho: 2.0, sigma_max: 1e8 },
            eps0: 1.0,
            eps_decay: 0.5,
            eta0: 1.0,
            eta_decay: 0.5,
            tol: 1e-8,
            max_outer: 100,
            inner_budget: 100_000,
            inner_tol: 1e-13,
            mode: CriterionMode::AAndB,
            inner_rule: InnerRule::Criteria,
        }
    }
}

impl AlmConfig {
    pub fn validate(&self) -> Result<()> {
        self.sigma.validate()?;
        let bad = |what: &str| Err(CccpError::InvalidConfig(what.to_string()));
        if !(self.eps0 > 0.0 && self.eta0 > 0.0) {
            return bad("eps0 and eta0 must be positive");
        }
        if !(self.eps_decay > 0.0 && self.eps_decay < 1.0 && self.eta_decay > 0.0 && self.eta_decay < 1.0) {
            return bad("decay factors must lie in (0, 1)");
        }
        if !(self.tol > 0.0) || !(self.inner_tol >= 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_outer == 0 || self.inner_budget == 0 {
            return bad("iteration budgets must be positive");
        }
        Ok(())
    }

    pub fn eps_k(&self, k: usize) -> f64 {
        self.eps0 * self.eps_decay.powi(k as i32)
    }

    pub fn eta_k(&self, k: usize) -> f64 {
        self.eta0 * self.eta_decay.powi(k as i32)
    }
}

/// Known solution data used only for diagnostics.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Oracle {
    pub y_star: Option<DVector<f64>>,
    pub optimal_value: Option<f64>,
}

/// Iterates of a running solve.
#[derive(Clone, Debug)]
pub struct AlmState {
    pub k: usize,
    pub x: DVector<f64>,
    /// Always an output of the polar projection, hence in `Q°`.
    pub y: DVector<f64>,
    pub sigma: f64,
    pub history: Vec<IterationRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    Converged,
    MaxOuter,
    InnerFailure { k: usize, reason: String },
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub termination: Termination,
    pub history: Vec<IterationRecord>,
    /// KKT residual at the starting point.
    pub initial_kkt: f64,
}

impl SolveResult {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

/// Effective floor on `||e||`: the configured tolerance, raised to the level
/// at which rounding in `y_k + sigma (Bx - b)` dominates `e`.
pub fn inner_floor(inner_tol: f64, sigma: f64, y_norm: f64, b_norm: f64) -> f64 {
    inner_tol.max(4.0 * f64::EPSILON * (y_norm + sigma * (1.0 + b_norm)))
}

/// ALM from `x = 0`, `y = 0`.
pub fn alm_solve<P, S>(problem: &P, cfg: &AlmConfig, inner: &mut S, oracle: &Oracle) -> Result<SolveResult>
where
    P: CccpProblem + ?Sized,
    S: InnerSolver<P> + ?Sized,
{
    let x0 = DVector::zeros(problem.primal_dim());
    let y0 = DVector::zeros(problem.dual_dim());
    alm_solve_from(problem, cfg, inner, oracle, x0, y0)
}

/// ALM from a given start; `y0` must lie in `Q°`.
pub fn alm_solve_from<P, S>(
    problem: &P,
    cfg: &AlmConfig,
    inner: &mut S,
    oracle: &Oracle,
    x0: DVector<f64>,
    y0: DVector<f64>,
) -> Result<SolveResult>
where
    P: CccpProblem + ?Sized,
    S: InnerSolver<P> + ?Sized,
{
    cfg.validate()?;
    if y0.len() != problem.dual_dim() {
        return Err(CccpError::DimensionMismatch { what: "y0", expected: problem.dual_dim(), found: y0.len() });
    }
    if x0.len() != problem.primal_dim() {
        return Err(CccpError::DimensionMismatch { what: "x0", expected: problem.primal_dim(), found: x0.len() });
    }
    if (problem.cone().project_polar(&y0)? - &y0).amax() > 1e-12 * (1.0 + y0.amax()) {
        return Err(CccpError::InvalidConfig("y0 must lie in the polar cone".into()));
    }
    let x_start = super::problem::prox_p_vec(problem, &x0)?;
    let initial_kkt = kkt_natural_residual(problem, &x_start, &y0)?.norm;
    let mut st = AlmState { k: 0, x: x_start, y: y0, sigma: cfg.sigma.initial(), history: Vec::new() };
    let dist = |y: &DVector<f64>| oracle.y_star.as_ref().map(|ys| (y - ys).norm());

    while st.k < cfg.max_outer {
        let k = st.k;
        let (eps, eta, sigma) = (cfg.eps_k(k), cfg.eta_k(k), st.sigma);
        let y_k = st.y.clone();
        let floor_tol = inner_floor(cfg.inner_tol, sigma, y_k.norm(), problem.rhs().norm());
        let mut stop = |x: &DVector<f64>, tp: &super::TildePoint| {
            let chk = criterion_check(problem, x, tp, &y_k, sigma, eps, eta);
            let floor = chk.e_norm <= floor_tol;
            match cfg.inner_rule {
                InnerRule::Tight => floor,
                InnerRule::Criteria => {
                    floor
                        || match cfg.mode {
                            CriterionMode::AOnly => chk.pass_a,
                            CriterionMode::AAndB => chk.pass_a && chk.pass_b,
                        }
                }
            }
        };
        let res = inner.solve(problem, &y_k, sigma, &st.x, cfg.inner_budget, &mut stop)?;
        let x_next = res.x;
        let tp = res.tilde;
        let chk = criterion_check(problem, &x_next, &tp, &y_k, sigma, eps, eta);
        let criteria_ok = match cfg.mode {
            CriterionMode::AOnly => chk.pass_a,
            CriterionMode::AAndB => chk.pass_a && chk.pass_b,
        };
        let accepted_by = if !res.converged {
            if chk.pass_a || chk.e_norm <= floor_tol {
                warn!("outer {k}: inner budget exhausted, accepting best iterate (||e|| = {:e})", chk.e_norm);
                Acceptance::BudgetFallback
            } else {
                let reason = format!(
                    "inner budget {} exhausted with ||e|| = {:e} above threshold {:e}",
                    cfg.inner_budget, chk.e_norm, chk.thr_a
                );
                warn!("outer {k}: {reason}");
                return Ok(SolveResult {
                    x: st.x,
                    y: st.y,
                    termination: Termination::InnerFailure { k, reason },
                    history: st.history,
                    initial_kkt,
                });
            }
        } else {
            match cfg.inner_rule {
                InnerRule::Tight => Acceptance::Tight,
                InnerRule::Criteria if criteria_ok => Acceptance::Criteria,
                InnerRule::Criteria => Acceptance::Floor,
            }
        };

        let y_next = dual_update(problem, &x_next, &y_k, sigma)?;
        debug_assert!((&y_next - &tp.y).amax() <= 1e-12 * (1.0 + y_next.amax()));
        let kkt = kkt_natural_residual(problem, &x_next, &y_next)?;
        let f_k = aug_lagrangian_value(problem, &x_next, &y_k, sigma)?;
        let duality_gap = dual_subproblem_value(problem, &tp, &y_k, sigma).ok().map(|g| f_k - g);
        let record = IterationRecord {
            k,
            sigma,
            kkt_res: kkt.norm,
            primal_infeas: kkt.primal_infeas,
            complementarity: kkt.complementarity,
            objective: kkt.objective,
            e_norm: chk.e_norm,
            thr_a: chk.thr_a,
            thr_b: chk.thr_b,
            pass_a: chk.pass_a,
            pass_b: chk.pass_b,
            accepted_by,
            eta_implied: match accepted_by {
                Acceptance::Tight | Acceptance::Floor => Some(0.0),
                Acceptance::Criteria | Acceptance::BudgetFallback => chk.implied_eta(eta),
            },
            inner_iters: res.iterations,
            dist_y_star: dist(&y_next),
            dist_y_star_prev: dist(&y_k),
            dy_norm: (&y_next - &y_k).norm(),
            y_norm: y_next.norm(),
            y_prev_norm: y_k.norm(),
            identity_gap: multiplier_identity_gap(problem, &x_next, &y_k, &y_next, sigma)?,
            duality_gap,
            duality_gap_bound: duality_gap_bound(problem, &x_next, &tp)?,
            subproblem_value: f_k,
            e_forms_gap: (&tp.e - e_via_prox(problem, &x_next, &tp)?).norm(),
            e_identity_gap: None,
            e_paths_gap: None,
            generic_thr_a: None,
            generic_thr_b: None,
            optimality_gap: oracle.optimal_value.map(|v| kkt.objective - v),
            inner_trace: Vec::new(),
        };
        info!(
            "outer {k}: sigma={sigma:e} kkt={:e} ||e||={:e} inner={} ({:?})",
            record.kkt_res, record.e_norm, record.inner_iters, accepted_by
        );
        debug!("outer {k}: thrA={:e} thrB={:e}", record.thr_a, record.thr_b);
        st.history.push(record);
        st.x = x_next;
        st.y = y_next;
        st.k += 1;
        if kkt.norm <= cfg.tol {
            return Ok(SolveResult {
                x: st.x,
                y: st.y,
                termination: Termination::Converged,
                history: st.history,
                initial_kkt,
            });
        }
        st.sigma = cfg.sigma.next(st.sigma);
    }
    Ok(SolveResult { x: st.x, y: st.y, termination: Termination::MaxOuter, history: st.history, initial_kkt })
}
