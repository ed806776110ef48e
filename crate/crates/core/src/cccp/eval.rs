use nalgebra::DVector;

use super::problem::{p_star_value_vec, p_value_vec, prox_p_star_vec, prox_p_vec};
use super::{CccpError, CccpProblem, Result};

fn check_len(what: &'static str, expected: usize, v: &DVector<f64>) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(CccpError::DimensionMismatch { what, expected, found: v.len() })
    }
}

/// Smooth part `phi = f_k - p` of the subproblem objective at one point.
#[derive(Clone, Debug)]
pub(crate) struct SmoothEval {
    pub value: f64,
    /// `A* w + B* y + c`.
    pub grad: DVector<f64>,
    pub w: DVector<f64>,
    pub y: DVector<f64>,
}

pub(crate) fn smooth_eval<P: CccpProblem + ?Sized>(
    problem: &P,
    x: &DVector<f64>,
    y_k: &DVector<f64>,
    sigma: f64,
) -> Result<SmoothEval> {
    let ax = problem.apply_a(x);
    let w = problem.grad_h(&ax);
    let shifted = y_k + (problem.apply_b(x) - problem.rhs()) * sigma;
    let y = problem.cone().project_polar(&shifted)?;
    let value =
        problem.h_value(&ax) + problem.linear_cost().dot(x) + (y.norm_squared() - y_k.norm_squared()) / (2.0 * sigma);
    let grad = problem.apply_a_adjoint(&w) + problem.apply_b_adjoint(&y) + problem.linear_cost();
    Ok(SmoothEval { value, grad, w, y })
}

/// `L_sigma(x, y) = f0(x) + (1/2 sigma)(||Pi_{Q°}[y + sigma(Bx - b)]||^2 - ||y||^2)`.
pub fn aug_lagrangian_value<P: CccpProblem + ?Sized>(
    problem: &P,
    x: &DVector<f64>,
    y: &DVector<f64>,
    sigma: f64,
) -> Result<f64> {
    check_len("x", problem.primal_dim(), x)?;
    check_len("y", problem.dual_dim(), y)?;
    let px = p_value_vec(problem, x)?.finite("p(x)")?;
    Ok(smooth_eval(problem, x, y, sigma)?.value + px)
}

/// `f0(x) = h(Ax) + <c, x> + p(x)`.
pub fn primal_objective<P: CccpProblem + ?Sized>(problem: &P, x: &DVector<f64>) -> Result<f64> {
    let px = p_value_vec(problem, x)?.finite("p(x)")?;
    Ok(problem.h_value(&problem.apply_a(x)) + problem.linear_cost().dot(x) + px)
}

/// Dual candidate `(w, y, s)` built from a primal point, and its residual `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct TildePoint {
    pub w: DVector<f64>,
    pub y: DVector<f64>,
    pub s: DVector<f64>,
    /// `A* w + B* y + s + c`.
    pub e: DVector<f64>,
}

impl TildePoint {
    pub fn e_norm(&self) -> f64 {
        self.e.norm()
    }

    /// `||(w, y, s)||`.
    pub fn dual_norm(&self) -> f64 {
        (self.w.norm_squared() + self.y.norm_squared() + self.s.norm_squared()).sqrt()
    }
}

pub(crate) fn tilde_from_eval<P: CccpProblem + ?Sized>(
    problem: &P,
    x: &DVector<f64>,
    ev: &SmoothEval,
) -> Result<TildePoint> {
    let s = prox_p_star_vec(problem, &(x - &ev.grad))?;
    let e = &ev.grad + &s;
    Ok(TildePoint { w: ev.w.clone(), y: ev.y.clone(), s, e })
}

/// The tilde point at `x` for the subproblem with multiplier `y_k` and penalty `sigma`.
pub fn tilde_point<P: CccpProblem + ?Sized>(
    problem: &P,
    x: &DVector<f64>,
    y_k: &DVector<f64>,
    sigma: f64,
) -> Result<TildePoint> {
    check_len("x", problem.primal_dim(), x)?;
    check_len("y_k", problem.dual_dim(), y_k)?;
    p_value_vec(problem, x)?.finite("p(x)")?;
    tilde_from_eval(problem, x, &smooth_eval(problem, x, y_k, sigma)?)
}

/// The other expression for `e`: `x - Prox_p[x - (A* w + B* y + c)]`.
pub fn e_via_prox<P: CccpProblem + ?Sized>(problem: &P, x: &DVector<f64>, tp: &TildePoint) -> Result<DVector<f64>> {
    let grad = problem.apply_a_adjoint(&tp.w) + problem.apply_b_adjoint(&tp.y) + problem.linear_cost();
    Ok(x - prox_p_vec(problem, &(x - grad))?)
}

/// `g_k(w, y, s) = -h*(w) - <b, y> - p*(s) - (1/2 sigma)||y - y_k||^2`.
pub fn dual_subproblem_value<P: CccpProblem + ?Sized>(
    problem: &P,
    tp: &TildePoint,
    y_k: &DVector<f64>,
    sigma: f64,
) -> Result<f64> {
    let hs = problem.h_star_value(&tp.w).finite("h*(w)")?;
    let ps = p_star_value_vec(problem, &tp.s)?.finite("p*(s)")?;
    Ok(-hs - problem.rhs().dot(&tp.y) - ps - (&tp.y - y_k).norm_squared() / (2.0 * sigma))
}

/// Right side of the duality-gap bound: `|<x - s, e>| + |p(x) - p(x - e)|`.
///
/// The `p` difference is 0 for indicator or zero `p` whenever both points are
/// feasible; when `x - e` leaves `dom p` the term is reported as infinite.
pub fn duality_gap_bound<P: CccpProblem + ?Sized>(problem: &P, x: &DVector<f64>, tp: &TildePoint) -> Result<f64> {
    let inner = (x - &tp.s).dot(&tp.e).abs();
    let px = p_value_vec(problem, x)?;
    let pxe = p_value_vec(problem, &(x - &tp.e))?;
    Ok(match (px, pxe) {
        (crate::matcone::ExtReal::Finite(a), crate::matcone::ExtReal::Finite(b)) => inner + (a - b).abs(),
        _ => f64::INFINITY,
    })
}

/// Natural-map residual of the KKT system and the auxiliary feasibility scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct KktResidual {
    pub r_x: DVector<f64>,
    pub r_y: DVector<f64>,
    pub norm: f64,
    /// `||Pi_{Q°}(Bx - b)||`.
    pub primal_infeas: f64,
    /// `|<y, Bx - b>|`.
    pub complementarity: f64,
    /// `f0(x)`.
    pub objective: f64,
}

pub fn kkt_natural_residual<P: CccpProblem + ?Sized>(
    problem: &P,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<KktResidual> {
    check_len("x", problem.primal_dim(), x)?;
    check_len("y", problem.dual_dim(), y)?;
    let objective = primal_objective(problem, x)?;
    let ax = problem.apply_a(x);
    let grad = problem.apply_a_adjoint(&problem.grad_h(&ax)) + problem.apply_b_adjoint(y) + problem.linear_cost();
    let r_x = x - prox_p_vec(problem, &(x - grad))?;
    let resid = problem.apply_b(x) - problem.rhs();
    let r_y = y - problem.cone().project_polar(&(y + &resid))?;
    let norm = (r_x.norm_squared() + r_y.norm_squared()).sqrt();
    let primal_infeas = problem.cone().project_polar(&resid)?.norm();
    let complementarity = y.dot(&resid).abs();
    Ok(KktResidual { r_x, r_y, norm, primal_infeas, complementarity, objective })
}

/// `y_next = Pi_{Q°}[y_k + sigma(B x_next - b)]`.
pub fn dual_update<P: CccpProblem + ?Sized>(
    problem: &P,
    x_next: &DVector<f64>,
    y_k: &DVector<f64>,
    sigma: f64,
) -> Result<DVector<f64>> {
    check_len("x", problem.primal_dim(), x_next)?;
    check_len("y_k", problem.dual_dim(), y_k)?;
    Ok(problem.cone().project_polar(&(y_k + (problem.apply_b(x_next) - problem.rhs()) * sigma))?)
}

/// `| ||Bx - b - Pi_Q[Bx - b + y_k/sigma]|| - ||y_next - y_k||/sigma |`, zero in exact arithmetic.
pub fn multiplier_identity_gap<P: CccpProblem + ?Sized>(
    problem: &P,
    x_next: &DVector<f64>,
    y_k: &DVector<f64>,
    y_next: &DVector<f64>,
    sigma: f64,
) -> Result<f64> {
    let resid = problem.apply_b(x_next) - problem.rhs();
    let lhs = (&resid - problem.cone().project(&(&resid + y_k / sigma))?).norm();
    Ok((lhs - (y_next - y_k).norm() / sigma).abs())
}
