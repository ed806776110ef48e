use serde::Serialize;

use super::{Acceptance, DiagnosticsError, IterationRecord, Result};

/// Which inequality a [`BoundCheck`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `dist(y^{k+1}) <= mu_k dist(y^k)` with the empirical `mu_k < 1`.
    DualContraction,
    /// `||Pi_{Q°}(Bx^{k+1} - b)|| <= dist(y^k) / ((1 - eta_k) sigma_k)`.
    PrimalInfeasibility,
    /// `|<y^{k+1}, Bx^{k+1} - b>| <= ||y^{k+1}|| dist(y^k) / ((1 - eta_k) sigma_k)`.
    Complementarity,
    /// `f0(x^{k+1}) - inf(P) <= mu'''_k dist(y^k)`.
    ObjectiveGap,
    /// `||y^{k+1} - y^k|| <= dist(y^k) / (1 - eta_k)`.
    StepLength,
    /// `dist(y^{k+1})^2 <= dist(y^k)^2 - ||y^{k+1} - y^k||^2`.
    Fejer,
    /// `||Bx - b - Pi_Q[Bx - b + y^k/sigma]|| = ||y^{k+1} - y^k|| / sigma`.
    MultiplierIdentity,
}

impl BoundKind {
    /// Asymptotic inequalities are only asserted once the inexactness
    /// tests have accepted an inner solve.
    pub fn is_asymptotic(self) -> bool {
        matches!(
            self,
            BoundKind::DualContraction
                | BoundKind::PrimalInfeasibility
                | BoundKind::Complementarity
                | BoundKind::ObjectiveGap
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub k: usize,
    pub kind: BoundKind,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    /// Evaluated before the first criteria acceptance; a failure here is not a violation.
    pub pre_asymptotic: bool,
}

/// Absolute slacks added to the right-hand sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundSlack {
    pub theorem: f64,
    pub step_length: f64,
    pub fejer: f64,
    pub identity: f64,
}

impl Default for BoundSlack {
    fn default() -> Self {
        BoundSlack { theorem: 1e-8, step_length: 1e-8, fejer: 1e-6, identity: 1e-11 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundCheckReport {
    /// Index of the first outer iteration accepted by the inexactness tests.
    pub first_acceptance: Option<usize>,
    pub checks: Vec<BoundCheck>,
}

impl BoundCheckReport {
    /// Failed checks that count as violations (pre-asymptotic ones excluded).
    pub fn violations(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.pass && !c.pre_asymptotic)
    }

    pub fn of(&self, kind: BoundKind) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(move |c| c.kind == kind)
    }

    pub fn all_pass(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// Evaluates the dual-rate inequalities on a history whose records carry
/// distances to a reference dual solution `y*`.
///
/// `eta_k` is the implied surrogate recorded at acceptance (0 for tight
/// solves); bounds with `eta_k >= 1` are vacuous and pass.
pub fn theorem_bound_report(history: &[IterationRecord], slack: &BoundSlack) -> Result<BoundCheckReport> {
    let first_acceptance = history.iter().find(|r| r.accepted_by != Acceptance::BudgetFallback).map(|r| r.k);
    let mut checks = Vec::new();
    for r in history {
        let (Some(d_next), Some(d)) = (r.dist_y_star, r.dist_y_star_prev) else {
            return Err(DiagnosticsError::MissingOracle { k: r.k });
        };
        let eta = r.eta_implied.unwrap_or(0.0);
        let inv = if eta < 1.0 { 1.0 / (1.0 - eta) } else { f64::INFINITY };
        let pre = first_acceptance.is_none_or(|k0| r.k < k0);
        let mut push = |kind: BoundKind, lhs: f64, rhs: f64, slack: f64| {
            checks.push(BoundCheck {
                k: r.k,
                kind,
                lhs,
                rhs,
                slack,
                pass: lhs <= rhs + slack,
                pre_asymptotic: pre && kind.is_asymptotic(),
            });
        };
        push(BoundKind::DualContraction, d_next, d, slack.theorem);
        push(BoundKind::PrimalInfeasibility, r.primal_infeas, d * inv / r.sigma, slack.theorem);
        push(BoundKind::Complementarity, r.complementarity, r.y_norm * d * inv / r.sigma, slack.theorem);
        if let Some(gap) = r.optimality_gap {
            let mu = (eta * eta * r.dy_norm + r.y_norm + r.y_prev_norm) * inv / (2.0 * r.sigma);
            push(BoundKind::ObjectiveGap, gap, mu * d, slack.theorem);
        }
        push(BoundKind::StepLength, r.dy_norm, d * inv, slack.step_length);
        push(BoundKind::Fejer, d_next * d_next, d * d - r.dy_norm * r.dy_norm, slack.fejer);
        push(BoundKind::MultiplierIdentity, r.identity_gap, 0.0, slack.identity);
    }
    Ok(BoundCheckReport { first_acceptance, checks })
}
