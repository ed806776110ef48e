use nalgebra::DVector;

use crate::matcone::{p_star_value_slice, p_value_slice, prox_slice, ConeProduct, ExtReal, Layout, ProxSpec};

use super::Result;

/// Problem data of
///
/// ```text
/// minimize h(Ax) + <c, x> + p(x)   subject to   Bx - b in Q
/// ```
///
/// Every element lives in a flat vector; symmetric blocks use the full `n*n`
/// layout. `p` is separable over the primal blocks, one [`ProxSpec`] each.
pub trait CccpProblem {
    fn primal_layout(&self) -> &Layout;
    fn prox_specs(&self) -> &[ProxSpec];
    fn cone(&self) -> &ConeProduct;
    /// Dimension of the space `h` lives on.
    fn smooth_dim(&self) -> usize;

    fn apply_a(&self, x: &DVector<f64>) -> DVector<f64>;
    fn apply_a_adjoint(&self, w: &DVector<f64>) -> DVector<f64>;
    fn apply_b(&self, x: &DVector<f64>) -> DVector<f64>;
    fn apply_b_adjoint(&self, y: &DVector<f64>) -> DVector<f64>;
    fn rhs(&self) -> &DVector<f64>;
    fn linear_cost(&self) -> &DVector<f64>;

    fn h_value(&self, w: &DVector<f64>) -> f64;
    fn grad_h(&self, w: &DVector<f64>) -> DVector<f64>;
    fn h_star_value(&self, w: &DVector<f64>) -> ExtReal;
    /// Least-norm element of `∂h*(w)`.
    fn grad_h_star(&self, w: &DVector<f64>) -> DVector<f64>;

    fn primal_dim(&self) -> usize {
        self.primal_layout().dim()
    }

    fn dual_dim(&self) -> usize {
        self.cone().dim()
    }
}

fn blockwise<P: CccpProblem + ?Sized>(problem: &P, v: &DVector<f64>, star: bool) -> Result<DVector<f64>> {
    let layout = problem.primal_layout();
    let mut out = DVector::zeros(layout.dim());
    for (i, (spec, shape)) in problem.prox_specs().iter().zip(layout.shapes()).enumerate() {
        let r = layout.range(i);
        let src = &v.as_slice()[r.clone()];
        let dst = &mut out.as_mut_slice()[r];
        prox_slice(spec, *shape, src, dst)?;
        if star {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = s - *d;
            }
        }
    }
    Ok(out)
}

/// `Prox_p(v)`, block by block.
pub fn prox_p_vec<P: CccpProblem + ?Sized>(problem: &P, v: &DVector<f64>) -> Result<DVector<f64>> {
    blockwise(problem, v, false)
}

/// `Prox_{p*}(v) = v - Prox_p(v)`, block by block.
pub fn prox_p_star_vec<P: CccpProblem + ?Sized>(problem: &P, v: &DVector<f64>) -> Result<DVector<f64>> {
    blockwise(problem, v, true)
}

fn sum_ext<P: CccpProblem + ?Sized>(
    problem: &P,
    v: &DVector<f64>,
    f: fn(&ProxSpec, crate::matcone::BlockShape, &[f64]) -> crate::matcone::Result<ExtReal>,
) -> Result<ExtReal> {
    let layout = problem.primal_layout();
    let mut total = 0.0;
    let mut worst: Option<f64> = None;
    for (i, (spec, shape)) in problem.prox_specs().iter().zip(layout.shapes()).enumerate() {
        match f(spec, *shape, layout.block(v, i))? {
            ExtReal::Finite(x) => total += x,
            ExtReal::PosInf { violation } => worst = Some(worst.unwrap_or(0.0).max(violation)),
        }
    }
    Ok(match worst {
        None => ExtReal::Finite(total),
        Some(violation) => ExtReal::PosInf { violation },
    })
}

pub fn p_value_vec<P: CccpProblem + ?Sized>(problem: &P, x: &DVector<f64>) -> Result<ExtReal> {
    sum_ext(problem, x, p_value_slice)
}

pub fn p_star_value_vec<P: CccpProblem + ?Sized>(problem: &P, s: &DVector<f64>) -> Result<ExtReal> {
    sum_ext(problem, s, p_star_value_slice)
}
