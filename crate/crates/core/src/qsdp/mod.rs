//! Convex quadratic SDP: the reduced inner objective `psi_k`, its
//! semismooth Newton-CG minimization, the specialized inexactness tests and
//! the natural residual map.

mod alm;
mod data;
mod newton;
mod psi;
mod residual;
mod view;

pub use alm::{qsdp_alm_solve, QsdpSolveResult};
pub use data::{EMap, HOperator, QsdpData, SelfAdjointOp};
pub use newton::{newton_cg_solve, NewtonConfig, NewtonOutcome, NewtonProbe};
pub use psi::{gen_hessian_apply, psi_eval, psi_grad, psi_value, NewtonCache, PsiEval};
pub use residual::{qsdp_criteria, qsdp_e_vector, qsdp_kkt_residual, QsdpEVector, QsdpKktResidual};
pub use view::QsdpCccp;

use thiserror::Error;

use crate::cccp::CccpError;
use crate::matcone::MatconeError;

#[derive(Debug, Error)]
pub enum QsdpError {
    #[error(transparent)]
    Matcone(#[from] MatconeError),
    #[error(transparent)]
    Cccp(#[from] CccpError),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("x1 leaves the range of H (distance {distance:e})")]
    RangeViolation { distance: f64 },
    #[error("Newton cache is stale (drift {drift:e})")]
    StaleCache { drift: f64 },
    #[error("Newton iteration budget exhausted")]
    BudgetExceeded { best: Box<NewtonOutcome> },
    #[error("line search found no sufficient decrease")]
    LineSearchStall { best: Box<NewtonOutcome> },
}

pub type Result<T> = std::result::Result<T, QsdpError>;
