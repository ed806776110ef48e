//! Augmented Lagrangian method for convex composite conic programs
//!
//! ```text
//! minimize h(Ax) + <c, x> + p(x)   subject to   Bx - b in Q
//! ```
//!
//! with implementable inner stopping rules, a semismooth Newton-CG inner
//! solver for convex quadratic SDP, and diagnostics that measure the
//! convergence rates the method is expected to show.

// `!(x >= 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cccp;
pub mod diagnostics;
pub mod instances;
pub mod matcone;
pub mod qsdp;
