use nalgebra::DVector;

use super::{CccpProblem, TildePoint};

/// Thresholds of the two inexactness tests and whether `||e||` meets them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriterionCheck {
    pub thr_a: f64,
    pub thr_b: f64,
    pub pass_a: bool,
    pub pass_b: bool,
    pub e_norm: f64,
}

impl CriterionCheck {
    /// Smallest `eta` for which the second test would still pass, given that
    /// `thr_b` was computed with `eta_hat`. `None` when `thr_b` is zero.
    pub fn implied_eta(&self, eta_hat: f64) -> Option<f64> {
        (self.thr_b > 0.0).then(|| eta_hat * (self.e_norm / self.thr_b).sqrt())
    }
}

/// Shared threshold formula:
///
/// ```text
/// thrA = (eps^2/sigma) / (1 + xn + zn) * min(1 / (gn + dyn/sigma + 1/sigma), 1)
/// thrB = thrA with eps^2 replaced by eta^2 * dyn^2
/// ```
///
/// `gn` is the norm of the conjugate gradient term and `dyn` the multiplier step.
#[allow(clippy::too_many_arguments)]
pub fn criterion_thresholds(
    e_norm: f64,
    x_norm: f64,
    z_norm: f64,
    gn: f64,
    dy_norm: f64,
    sigma: f64,
    eps: f64,
    eta: f64,
) -> CriterionCheck {
    let unit = (1.0 / sigma) / (1.0 + x_norm + z_norm) * (1.0 / (gn + dy_norm / sigma + 1.0 / sigma)).min(1.0);
    let thr_a = eps * eps * unit;
    let thr_b = eta * eta * dy_norm * dy_norm * unit;
    CriterionCheck { thr_a, thr_b, pass_a: e_norm <= thr_a, pass_b: e_norm <= thr_b, e_norm }
}

pub fn criterion_check<P: CccpProblem + ?Sized>(
    problem: &P,
    x: &DVector<f64>,
    tp: &TildePoint,
    y_k: &DVector<f64>,
    sigma: f64,
    eps: f64,
    eta: f64,
) -> CriterionCheck {
    criterion_thresholds(
        tp.e_norm(),
        x.norm(),
        tp.dual_norm(),
        problem.grad_h_star(&tp.w).norm(),
        (&tp.y - y_k).norm(),
        sigma,
        eps,
        eta,
    )
}
