//! Dense symmetric-matrix kernels, cone projections and proximal maps.
//!
//! Symmetric matrices use the full `n*n` column-major layout with the trace
//! inner product, so a `Psd(n)` block occupies `n*n` slots of a flat vector.

mod cone;
mod eigen;
mod layout;
mod prox;
mod sym;

pub use cone::{project_cone, project_polar, ConeBlock, ConeProduct, Value};
pub use eigen::{project_psd, sym_eigen, EigenDecomposition};
pub use layout::{BlockShape, Layout};
pub use prox::{p_star_value, p_value, prox_p, prox_p_star, ExtReal, ProxSpec, FEASIBILITY_TOL};
pub use sym::{asymmetry, symmetrize_in_place, SymMatrix};

pub(crate) use eigen::{eigen_of_slice, project_psd_slice};
pub(crate) use prox::{p_star_value_slice, p_value_slice, prox_slice};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatconeError {
    #[error("matrix is not symmetric (max asymmetry {max_asym:e})")]
    NonSymmetric { max_asym: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("eigensolver did not converge for order {order}")]
    NoConvergence { order: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cone block dimension must be positive")]
    EmptyBlock,
    #[error("value outside the domain: {0}")]
    DomainViolation(String),
}

pub type Result<T> = std::result::Result<T, MatconeError>;
