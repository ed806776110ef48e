use serde::{Deserialize, Serialize};

use super::{DiagnosticsError, Result};

/// Problem constants entering the R-superlinear rate of the KKT residual.
/// `gamma` is the error-bound constant and is never estimated from data.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub gamma: Option<f64>,
    /// Lipschitz constant of `p` on its domain (0 for indicators).
    pub lambda_p: Option<f64>,
    pub lambda_p_star: Option<f64>,
    pub lambda_grad_h_star: Option<f64>,
    pub b_norm: Option<f64>,
}

/// `beta = sqrt(2 [1 + lambda_p + gamma (||b|| + lambda_p*) + gamma^2 (1 + lambda_grad_h*)])`.
pub fn beta_constant(tc: &TheoryConstants) -> Result<f64> {
    let get = |v: Option<f64>, name: &'static str| v.ok_or(DiagnosticsError::MissingConstant(name));
    let gamma = get(tc.gamma, "gamma")?;
    if !(gamma >= 1.0) {
        return Err(DiagnosticsError::InvalidConstant(format!("gamma = {gamma} must be at least 1")));
    }
    let lp = get(tc.lambda_p, "lambda_p")?;
    let lps = get(tc.lambda_p_star, "lambda_p_star")?;
    let lh = get(tc.lambda_grad_h_star, "lambda_grad_h_star")?;
    let b = get(tc.b_norm, "b_norm")?;
    for (v, name) in [(lp, "lambda_p"), (lps, "lambda_p_star"), (lh, "lambda_grad_h_star"), (b, "b_norm")] {
        if !(v >= 0.0) {
            return Err(DiagnosticsError::InvalidConstant(format!("{name} = {v} must be nonnegative")));
        }
    }
    Ok((2.0 * (1.0 + lp + gamma * (b + lps) + gamma * gamma * (1.0 + lh))).sqrt())
}

/// Smallest `t` satisfying the residual test
/// `||e|| <= 2t / (1 + ||x|| + ||z||) * min(1 / (||grad h*(w)|| + ||y - y_k||/sigma + 1/sigma), 1)`.
pub fn residual_test_level(e_norm: f64, x_norm: f64, z_norm: f64, gn: f64, dy_norm: f64, sigma: f64) -> f64 {
    let m = (1.0 / (gn + dy_norm / sigma + 1.0 / sigma)).min(1.0);
    e_norm * (1.0 + x_norm + z_norm) / (2.0 * m)
}

/// Upper bound `beta^2 t` on `f_k(x) - inf f_k` once `t` from
/// [`residual_test_level`] is at most 1.
pub fn subproblem_gap_bound(beta: f64, t: f64) -> f64 {
    beta * beta * t
}
