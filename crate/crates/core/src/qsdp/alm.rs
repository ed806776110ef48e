use log::{info, warn};
use nalgebra::{DMatrix, DVector};

use crate::cccp::{
    aug_lagrangian_value, criterion_check, dual_subproblem_value, duality_gap_bound, e_via_prox, inner_floor,
    multiplier_identity_gap, tilde_point, AlmConfig, CriterionMode, InnerRule, Oracle, Termination,
};
use crate::diagnostics::{Acceptance, IterationRecord};

use super::newton::{newton_cg_solve, NewtonConfig, NewtonOutcome, NewtonProbe};
use super::residual::{qsdp_criteria, qsdp_e_vector, qsdp_kkt_residual};
use super::view::QsdpCccp;
use super::{QsdpData, QsdpError, Result};

#[derive(Clone, Debug)]
pub struct QsdpSolveResult {
    pub x1: DMatrix<f64>,
    pub x2: DVector<f64>,
    pub x3: DMatrix<f64>,
    /// The multiplier `X`, i.e. the solution of the dual problem.
    pub x: DMatrix<f64>,
    /// Multiplier and penalty the last inner subproblem was posed at.
    pub last_center: DMatrix<f64>,
    pub last_sigma: f64,
    pub termination: Termination,
    pub history: Vec<IterationRecord>,
    pub initial_kkt: f64,
}

impl QsdpSolveResult {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

fn x_norm(x1: &DMatrix<f64>, x2: &DVector<f64>, x3: &DMatrix<f64>) -> f64 {
    (x1.norm_squared() + x2.norm_squared() + x3.norm_squared()).sqrt()
}

/// ALM on the quadratic SDP with Newton-CG inner solves, from `x = 0`, `X = 0`.
///
/// `oracle.y_star`, when given, is the flattened dual solution `X*`.
pub fn qsdp_alm_solve(q: &QsdpData, cfg: &AlmConfig, ncfg: &NewtonConfig, oracle: &Oracle) -> Result<QsdpSolveResult> {
    cfg.validate()?;
    ncfg.validate()?;
    let (n, m) = (q.n(), q.m());
    let view = QsdpCccp::new(q);
    let mut x1 = DMatrix::zeros(n, n);
    let mut x2 = DVector::zeros(m);
    let mut x3 = DMatrix::zeros(n, n);
    let mut xk = DMatrix::<f64>::zeros(n, n);
    let initial_kkt = qsdp_kkt_residual(q, &x1, &x2, &x3, &xk)?.norm;
    let mut sigma = cfg.sigma.initial();
    let mut history = Vec::new();
    let mut last_center = xk.clone();
    let mut last_sigma = sigma;
    let data_norm = q.c().frobenius_norm() + q.b().norm();
    let flat = |x: &DMatrix<f64>| DVector::from_column_slice(x.as_slice());
    let dist = |x: &DMatrix<f64>| oracle.y_star.as_ref().map(|ys| (flat(x) - ys).norm());

    for k in 0..cfg.max_outer {
        let (eps, eta) = (cfg.eps_k(k), cfg.eta_k(k));
        let floor_tol = inner_floor(cfg.inner_tol, sigma, xk.norm(), data_norm);
        let check = |probe: &NewtonProbe| {
            let x3 = probe.eval.x3(sigma);
            let xn = x_norm(probe.x1, probe.x2, &x3);
            qsdp_criteria(q, xn, &probe.eval.x_plus, &xk, probe.eval.grad_norm(), sigma, eps, eta)
        };
        let mut stop = |probe: &NewtonProbe| {
            if probe.eval.grad_norm() <= floor_tol {
                return true;
            }
            if cfg.inner_rule == InnerRule::Tight {
                return false;
            }
            let chk = check(probe);
            match cfg.mode {
                CriterionMode::AOnly => chk.pass_a,
                CriterionMode::AAndB => chk.pass_a && chk.pass_b,
            }
        };
        let (out, converged): (NewtonOutcome, bool) =
            match newton_cg_solve(q, &xk, sigma, x1.clone(), x2.clone(), &mut stop, ncfg) {
                Ok(o) => (o, true),
                Err(QsdpError::BudgetExceeded { best }) | Err(QsdpError::LineSearchStall { best }) => (*best, false),
                Err(e) => return Err(e),
            };
        let probe = NewtonProbe { x1: &out.x1, x2: &out.x2, eval: &out.eval };
        let chk = check(&probe);
        let floor_hit = chk.e_norm <= floor_tol;
        let criteria_ok = match cfg.mode {
            CriterionMode::AOnly => chk.pass_a,
            CriterionMode::AAndB => chk.pass_a && chk.pass_b,
        };
        let accepted_by = if !converged {
            if chk.pass_a || floor_hit {
                warn!("outer {k}: Newton stopped early, accepting best iterate (||g|| = {:e})", chk.e_norm);
                Acceptance::BudgetFallback
            } else {
                let reason = format!("Newton-CG failed with ||grad psi|| = {:e} above {:e}", chk.e_norm, chk.thr_a);
                warn!("outer {k}: {reason}");
                return Ok(QsdpSolveResult {
                    x1,
                    x2,
                    x3,
                    last_center: xk.clone(),
                    last_sigma: sigma,
                    x: xk,
                    termination: Termination::InnerFailure { k, reason },
                    history,
                    initial_kkt,
                });
            }
        } else if cfg.inner_rule == InnerRule::Tight {
            Acceptance::Tight
        } else if criteria_ok {
            Acceptance::Criteria
        } else {
            Acceptance::Floor
        };

        let x_next = out.eval.x_plus.clone();
        let res = qsdp_kkt_residual(q, &out.x1, &out.x2, &out.x3, &x_next)?;
        let objective = 0.5 * out.x1.dot(&out.eval.hx1) - q.b().dot(&out.x2);

        let xf = view.pack(&out.x1, &out.x2, &out.x3);
        let yk = flat(&xk);
        let tp = tilde_point(&view, &xf, &yk, sigma)?;
        let f_k = aug_lagrangian_value(&view, &xf, &yk, sigma)?;
        let duality_gap = dual_subproblem_value(&view, &tp, &yk, sigma).ok().map(|g| f_k - g);
        let e_q = qsdp_e_vector(q, &out.x1, &out.x2, &out.x3, &xk, sigma)?;
        let e_generic = crate::diagnostics::split_three(&tp.e, n, m);
        let e_paths_gap = ((&e_generic.0 - &e_q.e1).norm_squared()
            + (&e_generic.1 - &e_q.e2).norm_squared()
            + (&e_generic.2 - &e_q.e3).norm_squared())
        .sqrt();
        let generic = criterion_check(&view, &xf, &tp, &yk, sigma, eps, eta);

        let record = IterationRecord {
            k,
            sigma,
            kkt_res: res.norm,
            primal_infeas: res.r4.norm(),
            complementarity: x_next.dot(&res.r4).abs(),
            objective,
            e_norm: chk.e_norm,
            thr_a: chk.thr_a,
            thr_b: chk.thr_b,
            pass_a: chk.pass_a,
            pass_b: chk.pass_b,
            accepted_by,
            eta_implied: match accepted_by {
                Acceptance::Tight | Acceptance::Floor => Some(0.0),
                _ => chk.implied_eta(eta),
            },
            inner_iters: out.iterations,
            dist_y_star: dist(&x_next),
            dist_y_star_prev: dist(&xk),
            dy_norm: (&x_next - &xk).norm(),
            y_norm: x_next.norm(),
            y_prev_norm: xk.norm(),
            identity_gap: multiplier_identity_gap(&view, &xf, &yk, &flat(&x_next), sigma)?,
            duality_gap,
            duality_gap_bound: duality_gap_bound(&view, &xf, &tp)?,
            subproblem_value: f_k,
            e_forms_gap: (&tp.e - e_via_prox(&view, &xf, &tp)?).norm(),
            e_identity_gap: Some(e_q.distance_to(&out.eval.grad1, &out.eval.grad2)),
            e_paths_gap: Some(e_paths_gap),
            generic_thr_a: Some(generic.thr_a),
            generic_thr_b: Some(generic.thr_b),
            optimality_gap: oracle.optimal_value.map(|v| objective - v),
            inner_trace: out.grad_norms.clone(),
        };
        info!(
            "outer {k}: sigma={sigma:e} ||R||={:e} ||g||={:e} newton={} ({:?})",
            record.kkt_res, record.e_norm, record.inner_iters, accepted_by
        );
        history.push(record);
        x1 = out.x1;
        x2 = out.x2;
        x3 = out.x3;
        last_center = std::mem::replace(&mut xk, x_next);
        last_sigma = sigma;
        if res.norm <= cfg.tol {
            let termination = Termination::Converged;
            return Ok(QsdpSolveResult {
                x1,
                x2,
                x3,
                x: xk,
                last_center,
                last_sigma,
                termination,
                history,
                initial_kkt,
            });
        }
        sigma = cfg.sigma.next(sigma);
    }
    let termination = Termination::MaxOuter;
    Ok(QsdpSolveResult { x1, x2, x3, x: xk, last_center, last_sigma, termination, history, initial_kkt })
}
