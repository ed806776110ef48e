use nalgebra::{DMatrix, DVector};

use crate::cccp::{criterion_thresholds, CriterionCheck};
use crate::matcone::{project_psd_slice, symmetrize_in_place};

use super::{QsdpData, Result};

fn psd_part(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = x.nrows();
    let mut out = DMatrix::zeros(n, n);
    project_psd_slice(n, x.as_slice(), out.as_mut_slice())?;
    Ok(out)
}

/// Residual `e` over the three primal blocks `(x1, x2, x3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QsdpEVector {
    pub e1: DMatrix<f64>,
    pub e2: DVector<f64>,
    pub e3: DMatrix<f64>,
}

impl QsdpEVector {
    pub fn norm(&self) -> f64 {
        (self.e1.norm_squared() + self.e2.norm_squared() + self.e3.norm_squared()).sqrt()
    }

    /// `||e - (g1, g2, 0)||`.
    pub fn distance_to(&self, g1: &DMatrix<f64>, g2: &DVector<f64>) -> f64 {
        ((&self.e1 - g1).norm_squared() + (&self.e2 - g2).norm_squared() + self.e3.norm_squared()).sqrt()
    }
}

/// `e` built from its definition for the quadratic SDP:
/// with `Y = X_k + sigma(-H x1 + E* x2 + x3 - C)`,
/// `e = (H x1 - H Y, E Y - b, x3 - Pi_+(x3 - Y))`.
///
/// When `x3` is the minimizing value for `(x1, x2)` this equals `(grad psi_k, 0)`.
pub fn qsdp_e_vector(
    q: &QsdpData,
    x1: &DMatrix<f64>,
    x2: &DVector<f64>,
    x3: &DMatrix<f64>,
    x_k: &DMatrix<f64>,
    sigma: f64,
) -> Result<QsdpEVector> {
    let hx1 = q.apply_h(x1);
    let mut y = x_k + (q.constraint_map(&hx1, x2) + x3) * sigma;
    symmetrize_in_place(q.n(), y.as_mut_slice());
    let e1 = &hx1 - q.apply_h(&y);
    let e2 = q.apply_e(&y) - q.b();
    let e3 = x3 - psd_part(&(x3 - &y))?;
    Ok(QsdpEVector { e1, e2, e3 })
}

/// Inexactness tests specialized to the quadratic SDP: `||grad psi||` against
/// thresholds built from `||H X+||`, `||X+ - X_k||` and `1 + ||x|| + ||X+||`.
#[allow(clippy::too_many_arguments)]
pub fn qsdp_criteria(
    q: &QsdpData,
    x_norm: f64,
    x_next: &DMatrix<f64>,
    x_k: &DMatrix<f64>,
    grad_norm: f64,
    sigma: f64,
    eps: f64,
    eta: f64,
) -> CriterionCheck {
    criterion_thresholds(
        grad_norm,
        x_norm,
        x_next.norm(),
        q.apply_h(x_next).norm(),
        (x_next - x_k).norm(),
        sigma,
        eps,
        eta,
    )
}

/// The four blocks of the natural residual map of the quadratic SDP.
#[derive(Clone, Debug, PartialEq)]
pub struct QsdpKktResidual {
    /// `H x1 - H X`.
    pub r1: DMatrix<f64>,
    /// `E X - b`.
    pub r2: DVector<f64>,
    /// `x3 - Pi_+(x3 - X)`.
    pub r3: DMatrix<f64>,
    /// `H x1 - E* x2 - x3 + C`.
    pub r4: DMatrix<f64>,
    pub norm: f64,
}

pub fn qsdp_kkt_residual(
    q: &QsdpData,
    x1: &DMatrix<f64>,
    x2: &DVector<f64>,
    x3: &DMatrix<f64>,
    x: &DMatrix<f64>,
) -> Result<QsdpKktResidual> {
    let hx1 = q.apply_h(x1);
    let r1 = &hx1 - q.apply_h(x);
    let r2 = q.apply_e(x) - q.b();
    let r3 = x3 - psd_part(&(x3 - x))?;
    let r4 = -(q.constraint_map(&hx1, x2) + x3);
    let norm = (r1.norm_squared() + r2.norm_squared() + r3.norm_squared() + r4.norm_squared()).sqrt();
    Ok(QsdpKktResidual { r1, r2, r3, r4, norm })
}
