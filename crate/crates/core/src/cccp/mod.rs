//! The abstract composite conic problem, the outer augmented Lagrangian
//! loop with its inexactness tests, and a generic first-order inner solver.

mod alm;
mod apg;
mod criterion;
mod dense;
mod eval;
mod problem;

pub use alm::{
    alm_solve, alm_solve_from, inner_floor, AlmConfig, AlmState, CriterionMode, InnerRule, Oracle, SigmaSchedule,
    SolveResult, Termination,
};
pub use apg::{inner_apg_solve, ApgConfig, ApgSolver, InnerResult, InnerSolver};
pub use criterion::{criterion_check, criterion_thresholds, CriterionCheck};
pub use dense::{DenseCccp, SmoothTerm};
pub use eval::{
    aug_lagrangian_value, dual_subproblem_value, dual_update, duality_gap_bound, e_via_prox, kkt_natural_residual,
    multiplier_identity_gap, primal_objective, tilde_point, KktResidual, TildePoint,
};
pub use problem::{p_star_value_vec, p_value_vec, prox_p_star_vec, prox_p_vec, CccpProblem};

use thiserror::Error;

use crate::matcone::MatconeError;

#[derive(Debug, Error)]
pub enum CccpError {
    #[error(transparent)]
    Matcone(#[from] MatconeError),
    #[error("{what}: expected dimension {expected}, found {found}")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("inner budget of {iterations} iterations exhausted")]
    BudgetExceeded { iterations: usize, best: Box<InnerResult> },
}

pub type Result<T> = std::result::Result<T, CccpError>;
