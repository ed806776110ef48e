//! Rate estimation, runtime checks of the theoretical inequalities, and
//! history rendering.

mod bounds;
mod history;
mod rate;
mod record;
mod theory;

pub use bounds::{theorem_bound_report, BoundCheck, BoundCheckReport, BoundKind, BoundSlack};
pub use history::{history_csv, history_json, CSV_HEADER};
pub use rate::{default_window_start, fit_linear_rate, last_three_decreasing, RateReport, SUPERLINEAR_THRESHOLD};
pub use record::{Acceptance, IterationRecord};
pub use theory::{beta_constant, residual_test_level, subproblem_gap_bound, TheoryConstants};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("sequence has {len} usable entries, at least {needed} needed")]
    TooShort { len: usize, needed: usize },
    #[error("residual {index} is {value}, not positive")]
    NonPositiveResidual { index: usize, value: f64 },
    #[error("record {k} has no distance to a reference dual solution")]
    MissingOracle { k: usize },
    #[error("constant '{0}' not supplied")]
    MissingConstant(&'static str),
    #[error("invalid constant: {0}")]
    InvalidConstant(String),
}

pub type Result<T> = std::result::Result<T, DiagnosticsError>;

/// Splits a flat `(S^n, R^m, S^n)` vector into its blocks.
pub(crate) fn split_three(v: &DVector<f64>, n: usize, m: usize) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let s = v.as_slice();
    (
        DMatrix::from_column_slice(n, n, &s[..n * n]),
        DVector::from_column_slice(&s[n * n..n * n + m]),
        DMatrix::from_column_slice(n, n, &s[n * n + m..]),
    )
}
