use nalgebra::DVector;

use super::eval::{smooth_eval, tilde_from_eval, SmoothEval};
use super::problem::prox_p_vec;
use super::{CccpError, CccpProblem, Result, TildePoint};

/// Outcome of an inner solve. `converged == false` means the budget ran out
/// and `x` is the iterate with the smallest `||e||` seen.
#[derive(Clone, Debug)]
pub struct InnerResult {
    pub x: DVector<f64>,
    pub tilde: TildePoint,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f_k = L_sigma(., y_k)` until `stop` accepts an iterate.
pub trait InnerSolver<P: CccpProblem + ?Sized> {
    fn solve(
        &mut self,
        problem: &P,
        y_k: &DVector<f64>,
        sigma: f64,
        x0: &DVector<f64>,
        budget: usize,
        stop: &mut dyn FnMut(&DVector<f64>, &TildePoint) -> bool,
    ) -> Result<InnerResult>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApgConfig {
    /// Starting Lipschitz estimate; probed from a gradient difference when `None`.
    pub initial_lipschitz: Option<f64>,
    /// The estimate is multiplied by this after each accepted step.
    pub lipschitz_decay: f64,
    pub max_backtracks: usize,
    /// Record `f_k` at every accepted iterate in [`ApgSolver::trace`].
    pub record_trace: bool,
}

impl Default for ApgConfig {
    fn default() -> Self {
        ApgConfig { initial_lipschitz: None, lipschitz_decay: 0.9, max_backtracks: 60, record_trace: false }
    }
}

/// Accelerated proximal gradient with backtracking on a local Lipschitz
/// estimate and adaptive (gradient and function value) restarts.
#[derive(Clone, Debug, Default)]
pub struct ApgSolver {
    pub config: ApgConfig,
    /// `f_k` at the accepted iterates of the last solve, when enabled.
    pub trace: Vec<f64>,
}

impl ApgSolver {
    pub fn new(config: ApgConfig) -> Self {
        ApgSolver { config, trace: Vec::new() }
    }
}

fn probe_lipschitz<P: CccpProblem + ?Sized>(
    problem: &P,
    x: &DVector<f64>,
    ex: &SmoothEval,
    y_k: &DVector<f64>,
    sigma: f64,
) -> Result<f64> {
    let gn = ex.grad.norm();
    if gn == 0.0 {
        return Ok(1.0);
    }
    let step = 1e-4 * (1.0 + x.norm()) / gn;
    let probe = smooth_eval(problem, &(x - &ex.grad * step), y_k, sigma)?;
    let l = (&probe.grad - &ex.grad).norm() / (step * gn);
    Ok(if l.is_finite() && l > 0.0 { l } else { 1.0 })
}

impl<P: CccpProblem + ?Sized> InnerSolver<P> for ApgSolver {
    fn solve(
        &mut self,
        problem: &P,
        y_k: &DVector<f64>,
        sigma: f64,
        x0: &DVector<f64>,
        budget: usize,
        stop: &mut dyn FnMut(&DVector<f64>, &TildePoint) -> bool,
    ) -> Result<InnerResult> {
        let cfg = self.config.clone();
        self.trace.clear();
        let mut x = prox_p_vec(problem, x0)?;
        let mut ex = smooth_eval(problem, &x, y_k, sigma)?;
        if cfg.record_trace {
            self.trace.push(ex.value);
        }
        let tp = tilde_from_eval(problem, &x, &ex)?;
        if stop(&x, &tp) {
            return Ok(InnerResult { x, tilde: tp, iterations: 0, converged: true });
        }
        let mut best = (x.clone(), tp);
        let mut lip = match cfg.initial_lipschitz {
            Some(l) => l,
            None => probe_lipschitz(problem, &x, &ex, y_k, sigma)?,
        };
        let mut yv = x.clone();
        let mut ey = ex.clone();
        let mut t = 1.0_f64;
        // true when yv == x, i.e. the next step is a plain proximal gradient step
        let mut plain = true;
        for it in 1..=budget {
            let mut tries = 0;
            let (xn, en) = loop {
                let xn = prox_p_vec(problem, &(&yv - &ey.grad / lip))?;
                let en = smooth_eval(problem, &xn, y_k, sigma)?;
                let dn = (&xn - &yv).norm();
                let gdiff = (&en.grad - &ey.grad).norm();
                if dn == 0.0 || gdiff <= lip * dn || tries >= cfg.max_backtracks {
                    break (xn, en);
                }
                lip = (2.0 * lip).max(gdiff / dn);
                tries += 1;
            };
            let tpn = tilde_from_eval(problem, &xn, &en)?;
            if stop(&xn, &tpn) {
                return Ok(InnerResult { x: xn, tilde: tpn, iterations: it, converged: true });
            }
            if tpn.e_norm() < best.1.e_norm() {
                best = (xn.clone(), tpn);
            }
            let climbed = en.value > ex.value + 4.0 * f64::EPSILON * ex.value.abs();
            if climbed {
                // discard the step and take a plain proximal gradient step from x next
                if plain {
                    lip *= 2.0;
                }
                t = 1.0;
                yv = x.clone();
                ey = ex.clone();
                plain = true;
                continue;
            }
            plain = (&yv - &xn).dot(&(&xn - &x)) > 0.0;
            if plain {
                t = 1.0;
                yv = xn.clone();
                ey = en.clone();
            } else {
                let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
                yv = &xn + (&xn - &x) * ((t - 1.0) / tn);
                t = tn;
                ey = smooth_eval(problem, &yv, y_k, sigma)?;
            }
            x = xn;
            ex = en;
            if cfg.record_trace {
                self.trace.push(ex.value);
            }
            lip *= cfg.lipschitz_decay;
        }
        Ok(InnerResult { x: best.0, tilde: best.1, iterations: budget, converged: false })
    }
}

/// Runs [`ApgSolver`] and turns budget exhaustion into `BudgetExceeded`.
pub fn inner_apg_solve<P: CccpProblem + ?Sized>(
    problem: &P,
    y_k: &DVector<f64>,
    sigma: f64,
    x0: &DVector<f64>,
    budget: usize,
    stop: &mut dyn FnMut(&DVector<f64>, &TildePoint) -> bool,
) -> Result<InnerResult> {
    let res = ApgSolver::default().solve(problem, y_k, sigma, x0, budget, stop)?;
    if res.converged {
        Ok(res)
    } else {
        Err(CccpError::BudgetExceeded { iterations: res.iterations, best: Box::new(res) })
    }
}
