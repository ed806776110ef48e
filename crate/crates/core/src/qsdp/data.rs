use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::matcone::SymMatrix;

use super::{QsdpError, Result};

/// Self-adjoint positive semidefinite operator on `S^n`.
pub trait SelfAdjointOp: Send + Sync {
    fn order(&self) -> usize;
    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64>;
    /// Moore-Penrose pseudoinverse.
    fn pinv_apply(&self, x: &DMatrix<f64>) -> DMatrix<f64>;
    /// Orthogonal projection onto the range.
    fn project_range(&self, x: &DMatrix<f64>) -> DMatrix<f64>;
}

/// The operator `H` of the quadratic term.
#[derive(Clone)]
pub enum HOperator {
    /// `W -> weights o W` where `weights = H o H` is entrywise nonnegative.
    Hadamard {
        weights: SymMatrix,
    },
    Custom(Arc<dyn SelfAdjointOp>),
}

impl fmt::Debug for HOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HOperator::Hadamard { weights } => f.debug_struct("Hadamard").field("weights", weights).finish(),
            HOperator::Custom(op) => write!(f, "Custom(order {})", op.order()),
        }
    }
}

/// Linear map `E: S^n -> R^m`.
#[derive(Clone, Debug, PartialEq)]
pub enum EMap {
    /// `E X = diag(X)`, `E* y = Diag(y)`.
    Diagonal,
    /// `(E X)_i = <A_i, X>`, `E* y = sum_i y_i A_i`.
    Rows(Vec<SymMatrix>),
}

/// Data `(H, E, C, b)` of
///
/// ```text
/// minimize 1/2 <x1, H x1> - <b, x2>   s.t.  -H x1 + E* x2 + x3 = C,  x3 psd,  x1 in Ran(H)
/// ```
///
/// whose dual is `max -1/2 <X, H X> - <C, X>  s.t.  E X = b,  X psd`.
#[derive(Clone, Debug)]
pub struct QsdpData {
    n: usize,
    h: HOperator,
    e: EMap,
    c: SymMatrix,
    b: DVector<f64>,
}

impl QsdpData {
    pub fn new(h: HOperator, e: EMap, c: SymMatrix, b: DVector<f64>) -> Result<Self> {
        let n = c.order();
        let h_order = match &h {
            HOperator::Hadamard { weights } => {
                if weights.as_slice().iter().any(|w| !(*w >= 0.0)) {
                    return Err(QsdpError::InvalidData("Hadamard weights must be nonnegative".into()));
                }
                weights.order()
            }
            HOperator::Custom(op) => op.order(),
        };
        if h_order != n {
            return Err(QsdpError::InvalidData(format!("H has order {h_order}, C has order {n}")));
        }
        let m = match &e {
            EMap::Diagonal => n,
            EMap::Rows(rows) => {
                if let Some(bad) = rows.iter().find(|r| r.order() != n) {
                    return Err(QsdpError::InvalidData(format!("E row of order {} for n = {n}", bad.order())));
                }
                rows.len()
            }
        };
        if b.len() != m {
            return Err(QsdpError::InvalidData(format!("b has length {}, E has {m} rows", b.len())));
        }
        Ok(QsdpData { n, h, e, c, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn h(&self) -> &HOperator {
        &self.h
    }

    pub fn e(&self) -> &EMap {
        &self.e
    }

    pub fn c(&self) -> &SymMatrix {
        &self.c
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn apply_h(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.h {
            HOperator::Hadamard { weights } => weights.as_matrix().component_mul(x),
            HOperator::Custom(op) => op.apply(x),
        }
    }

    pub fn apply_h_pinv(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.h {
            HOperator::Hadamard { weights } => x.zip_map(weights.as_matrix(), |v, w| if w > 0.0 { v / w } else { 0.0 }),
            HOperator::Custom(op) => op.pinv_apply(x),
        }
    }

    pub fn project_range_h(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.h {
            HOperator::Hadamard { weights } => x.zip_map(weights.as_matrix(), |v, w| if w > 0.0 { v } else { 0.0 }),
            HOperator::Custom(op) => op.project_range(x),
        }
    }

    pub fn apply_e(&self, x: &DMatrix<f64>) -> DVector<f64> {
        match &self.e {
            EMap::Diagonal => x.diagonal(),
            EMap::Rows(rows) => DVector::from_iterator(rows.len(), rows.iter().map(|r| r.as_matrix().dot(x))),
        }
    }

    pub fn apply_e_adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        match &self.e {
            EMap::Diagonal => DMatrix::from_diagonal(y),
            EMap::Rows(rows) => {
                let mut out = DMatrix::zeros(self.n, self.n);
                for (r, yi) in rows.iter().zip(y.iter()) {
                    out += r.as_matrix() * *yi;
                }
                out
            }
        }
    }

    /// `-H x1 + E* x2 - C`.
    pub(crate) fn constraint_map(&self, hx1: &DMatrix<f64>, x2: &DVector<f64>) -> DMatrix<f64> {
        self.apply_e_adjoint(x2) - hx1 - self.c.as_matrix()
    }
}
