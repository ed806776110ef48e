//! Constructors for the bundled test problems, random instances, and
//! instance files.

mod examples;
mod io;
mod ncm;

pub use examples::{
    build_example1, build_example2, example1_oracle, example1_solution, example1_weight, example2_dual_distance,
};
pub use io::{
    instance_from_manifest, load_instance, matrix_market_string, parse_matrix_market, read_matrix_market,
    write_matrix_market, write_ncm_instance, Instance, InstanceKind, InstanceManifest,
};
pub use ncm::{build_ncm, gen_random_ncm};

use thiserror::Error;

use crate::cccp::CccpError;
use crate::matcone::MatconeError;
use crate::qsdp::QsdpError;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("{file}{}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Parse { file: String, line: Option<usize>, message: String },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("mask has order {mask}, G has order {g}")]
    MaskShapeMismatch { g: usize, mask: usize },
    #[error("mask diagonal entry {index} is not 1")]
    NonUnitDiagonalMask { index: usize },
    #[error("missing fraction {0} outside [0, 1)")]
    BadFraction(f64),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Matcone(#[from] MatconeError),
    #[error(transparent)]
    Cccp(#[from] CccpError),
    #[error(transparent)]
    Qsdp(#[from] QsdpError),
}

pub type Result<T> = std::result::Result<T, InstanceError>;
