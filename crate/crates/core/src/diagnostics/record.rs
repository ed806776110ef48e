use serde::{Deserialize, Serialize};

/// Why an inner solve was accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceptance {
    /// The inexactness tests of the configured mode passed.
    Criteria,
    /// `||e||` reached the configured floor before the tests passed.
    Floor,
    /// The inner rule demanded `||e||` below the floor, and it got there.
    Tight,
    /// Budget exhausted; the best iterate passed the first test only.
    BudgetFallback,
}

/// One outer iteration: everything measured at `(x^{k+1}, y^{k+1})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub sigma: f64,
    pub kkt_res: f64,
    pub primal_infeas: f64,
    pub complementarity: f64,
    pub objective: f64,
    pub e_norm: f64,
    pub thr_a: f64,
    pub thr_b: f64,
    pub pass_a: bool,
    pub pass_b: bool,
    pub accepted_by: Acceptance,
    /// Smallest `eta` for which the second test holds at acceptance.
    pub eta_implied: Option<f64>,
    pub inner_iters: usize,
    /// `||y^{k+1} - y*||`.
    pub dist_y_star: Option<f64>,
    /// `||y^k - y*||`.
    pub dist_y_star_prev: Option<f64>,
    /// `||y^{k+1} - y^k||`.
    pub dy_norm: f64,
    /// `||y^{k+1}||`.
    pub y_norm: f64,
    /// `||y^k||`.
    pub y_prev_norm: f64,
    /// Mismatch of the multiplier-step identity, zero in exact arithmetic.
    pub identity_gap: f64,
    /// `f_k - g_k` at the accepted point, when the dual value is finite.
    pub duality_gap: Option<f64>,
    pub duality_gap_bound: f64,
    /// `f_k` at the accepted point.
    pub subproblem_value: f64,
    /// Disagreement between the two expressions for `e`.
    pub e_forms_gap: f64,
    /// Quadratic SDP only: `||e - (grad psi_k, 0)||` with `e` from its definition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_identity_gap: Option<f64>,
    /// Quadratic SDP only: distance between the generic and the specialized `e`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_paths_gap: Option<f64>,
    /// Quadratic SDP only: the generic thresholds, with `||grad h*||` in place of `||H X^{k+1}||`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generic_thr_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generic_thr_b: Option<f64>,
    /// `f0(x^{k+1}) - inf(P)` when the optimal value is known.
    pub optimality_gap: Option<f64>,
    /// Inner gradient norms, one per Newton step; empty for first-order inner solvers.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inner_trace: Vec<f64>,
}
