use nalgebra::{DMatrix, DVector};

use crate::matcone::{eigen_of_slice, symmetrize_in_place, EigenDecomposition, SymMatrix};

use super::{QsdpData, QsdpError, Result};

const RANGE_TOL: f64 = 1e-10;

/// `psi_k` and everything computed along the way at one `(x1, x2)`.
#[derive(Clone, Debug)]
pub struct PsiEval {
    pub value: f64,
    /// Sum of magnitudes of the terms of `value`; sets its rounding level.
    pub scale: f64,
    pub grad1: DMatrix<f64>,
    pub grad2: DVector<f64>,
    /// `M = X_k + sigma (-H x1 + E* x2 - C)`.
    pub m: DMatrix<f64>,
    pub eig: EigenDecomposition,
    /// `Pi_+(M)`, the next multiplier if this point is accepted.
    pub x_plus: DMatrix<f64>,
    pub hx1: DMatrix<f64>,
}

impl PsiEval {
    pub fn grad_norm(&self) -> f64 {
        (self.grad1.norm_squared() + self.grad2.norm_squared()).sqrt()
    }

    /// `x3 = (Pi_+(M) - M) / sigma`.
    pub fn x3(&self, sigma: f64) -> DMatrix<f64> {
        let mut x3 = (&self.x_plus - &self.m) / sigma;
        let n = x3.nrows();
        symmetrize_in_place(n, x3.as_mut_slice());
        x3
    }
}

pub(crate) fn check_range(q: &QsdpData, x1: &DMatrix<f64>) -> Result<()> {
    let off = (x1 - q.project_range_h(x1)).norm();
    if off > RANGE_TOL * (1.0 + x1.norm()) {
        return Err(QsdpError::RangeViolation { distance: off });
    }
    Ok(())
}

pub(crate) fn psi_eval_unchecked(
    q: &QsdpData,
    x1: &DMatrix<f64>,
    x2: &DVector<f64>,
    x_k: &DMatrix<f64>,
    sigma: f64,
) -> Result<PsiEval> {
    let n = q.n();
    let hx1 = q.apply_h(x1);
    let mut m = x_k + q.constraint_map(&hx1, x2) * sigma;
    symmetrize_in_place(n, m.as_mut_slice());
    let eig = eigen_of_slice(n, m.as_slice())?;
    let x_plus = if eig.values[0] >= 0.0 {
        m.clone()
    } else if eig.values[n - 1] <= 0.0 {
        DMatrix::zeros(n, n)
    } else {
        eig.positive_part()
    };
    let quad = 0.5 * x1.dot(&hx1);
    let lin = q.b().dot(x2);
    let pn = x_plus.norm_squared() / (2.0 * sigma);
    let kn = x_k.norm_squared() / (2.0 * sigma);
    let value = quad - lin + pn - kn;
    let scale = quad.abs() + lin.abs() + pn + kn;
    let grad1 = &hx1 - q.apply_h(&x_plus);
    let grad2 = q.apply_e(&x_plus) - q.b();
    Ok(PsiEval { value, scale, grad1, grad2, m, eig, x_plus, hx1 })
}

/// `psi_k(x1, x2) = 1/2 <x1, H x1> - <b, x2> + (1/2 sigma)(||Pi_+(M)||^2 - ||X_k||^2)`.
pub fn psi_eval(q: &QsdpData, x1: &SymMatrix, x2: &DVector<f64>, x_k: &SymMatrix, sigma: f64) -> Result<PsiEval> {
    check_dims(q, x1, x2, x_k)?;
    check_range(q, x1.as_matrix())?;
    psi_eval_unchecked(q, x1.as_matrix(), x2, x_k.as_matrix(), sigma)
}

pub fn psi_value(q: &QsdpData, x1: &SymMatrix, x2: &DVector<f64>, x_k: &SymMatrix, sigma: f64) -> Result<f64> {
    Ok(psi_eval(q, x1, x2, x_k, sigma)?.value)
}

/// `(H x1 - H Pi_+(M), E Pi_+(M) - b)`.
pub fn psi_grad(
    q: &QsdpData,
    x1: &SymMatrix,
    x2: &DVector<f64>,
    x_k: &SymMatrix,
    sigma: f64,
) -> Result<(SymMatrix, DVector<f64>)> {
    let ev = psi_eval(q, x1, x2, x_k, sigma)?;
    Ok((SymMatrix::symmetrized(ev.grad1), ev.grad2))
}

fn check_dims(q: &QsdpData, x1: &SymMatrix, x2: &DVector<f64>, x_k: &SymMatrix) -> Result<()> {
    if x1.order() != q.n() || x_k.order() != q.n() || x2.len() != q.m() {
        return Err(QsdpError::InvalidData(format!(
            "point of shape ({}, {}, {}) for n = {}, m = {}",
            x1.order(),
            x2.len(),
            x_k.order(),
            q.n(),
            q.m()
        )));
    }
    Ok(())
}

/// Data for applying one element of the generalized Hessian of `psi_k`.
#[derive(Clone, Debug)]
pub struct NewtonCache {
    pub m: DMatrix<f64>,
    pub eig: EigenDecomposition,
    /// Divided-difference weights of `Pi_+` in the eigenbasis of `M`; entries in `[0, 1]`.
    pub omega: DMatrix<f64>,
    pub sigma: f64,
}

impl NewtonCache {
    pub fn from_eval(ev: &PsiEval, sigma: f64) -> Self {
        let eig = ev.eig.clone();
        let n = eig.order();
        let tol = eig.zero_threshold();
        let lam = &eig.values;
        let omega = DMatrix::from_fn(n, n, |i, j| {
            let (li, lj) = (lam[i], lam[j]);
            match (li > tol, lj > tol) {
                (true, true) => 1.0,
                (false, false) => 0.0,
                (true, false) => li / (li + (-lj).max(0.0)),
                (false, true) => lj / (lj + (-li).max(0.0)),
            }
        });
        NewtonCache { m: ev.m.clone(), eig, omega, sigma }
    }

    pub fn new(q: &QsdpData, x1: &SymMatrix, x2: &DVector<f64>, x_k: &SymMatrix, sigma: f64) -> Result<Self> {
        Ok(Self::from_eval(&psi_eval(q, x1, x2, x_k, sigma)?, sigma))
    }

    /// `P (Omega o (P^T D P)) P^T`.
    pub fn jacobian_apply(&self, d: &DMatrix<f64>) -> DMatrix<f64> {
        let p = &self.eig.vectors;
        let inner = (p.transpose() * d * p).component_mul(&self.omega);
        let mut out = p * inner * p.transpose();
        let n = out.nrows();
        symmetrize_in_place(n, out.as_mut_slice());
        out
    }

    /// `V (d1, d2)` with `V = diag(H, 0) + sigma J* dPi J` and `J d = -H d1 + E* d2`.
    pub fn apply(&self, q: &QsdpData, d1: &DMatrix<f64>, d2: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
        let jd = q.apply_e_adjoint(d2) - q.apply_h(d1);
        let dp = self.jacobian_apply(&jd) * self.sigma;
        (q.apply_h(d1) - q.apply_h(&dp), q.apply_e(&dp))
    }
}

/// Applies the generalized Hessian after checking that `cache` was built at `(x1, x2)`.
#[allow(clippy::too_many_arguments)]
pub fn gen_hessian_apply(
    q: &QsdpData,
    cache: &NewtonCache,
    x1: &SymMatrix,
    x2: &DVector<f64>,
    x_k: &SymMatrix,
    d1: &SymMatrix,
    d2: &DVector<f64>,
) -> Result<(SymMatrix, DVector<f64>)> {
    let hx1 = q.apply_h(x1.as_matrix());
    let m = x_k.as_matrix() + q.constraint_map(&hx1, x2) * cache.sigma;
    let drift = (&m - &cache.m).amax();
    if drift > 1e-12 * (1.0 + m.amax()) {
        return Err(QsdpError::StaleCache { drift });
    }
    let (v1, v2) = cache.apply(q, d1.as_matrix(), d2);
    Ok((SymMatrix::symmetrized(v1), v2))
}
