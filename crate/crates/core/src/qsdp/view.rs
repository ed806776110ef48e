use nalgebra::{DMatrix, DVector};

use crate::cccp::CccpProblem;
use crate::matcone::{BlockShape, ConeBlock, ConeProduct, ExtReal, Layout, ProxSpec, FEASIBILITY_TOL};

use super::QsdpData;

/// A quadratic SDP seen as a generic composite conic problem.
///
/// `x = (x1, x2, x3)`, `A x = x1`, `h(w) = 1/2 <w, H w>`, `c = (0, -b, 0)`,
/// `p = delta_psd(x3)`, `B x = -H x1 + E* x2 + x3`, right side `C`, `Q = {0}`.
/// The `x1 in Ran(H)` restriction is dropped; it does not change `H x1`.
#[derive(Clone, Debug)]
pub struct QsdpCccp<'a> {
    q: &'a QsdpData,
    layout: Layout,
    prox: Vec<ProxSpec>,
    cone: ConeProduct,
    rhs: DVector<f64>,
    cost: DVector<f64>,
}

impl<'a> QsdpCccp<'a> {
    pub fn new(q: &'a QsdpData) -> Self {
        let (n, m) = (q.n(), q.m());
        let layout = Layout::new(vec![BlockShape::Sym(n), BlockShape::Vector(m), BlockShape::Sym(n)]);
        let mut cost = DVector::zeros(layout.dim());
        cost.rows_mut(n * n, m).copy_from(&(-q.b()));
        QsdpCccp {
            q,
            prox: vec![ProxSpec::ZeroFunction, ProxSpec::ZeroFunction, ProxSpec::IndicatorPsd(n)],
            cone: ConeProduct::new(vec![ConeBlock::Zero(n * n)]).expect("n > 0"),
            rhs: DVector::from_column_slice(q.c().as_slice()),
            cost,
            layout,
        }
    }

    /// Packs `(x1, x2, x3)` into a flat vector.
    pub fn pack(&self, x1: &DMatrix<f64>, x2: &DVector<f64>, x3: &DMatrix<f64>) -> DVector<f64> {
        let mut v = self.layout.zeros();
        v.as_mut_slice()[self.layout.range(0)].copy_from_slice(x1.as_slice());
        v.as_mut_slice()[self.layout.range(1)].copy_from_slice(x2.as_slice());
        v.as_mut_slice()[self.layout.range(2)].copy_from_slice(x3.as_slice());
        v
    }

    fn mat(&self, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.q.n(), self.q.n(), v)
    }
}

impl CccpProblem for QsdpCccp<'_> {
    fn primal_layout(&self) -> &Layout {
        &self.layout
    }

    fn prox_specs(&self) -> &[ProxSpec] {
        &self.prox
    }

    fn cone(&self) -> &ConeProduct {
        &self.cone
    }

    fn smooth_dim(&self) -> usize {
        self.q.n() * self.q.n()
    }

    fn apply_a(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_column_slice(self.layout.block(x, 0))
    }

    fn apply_a_adjoint(&self, w: &DVector<f64>) -> DVector<f64> {
        let mut v = self.layout.zeros();
        v.as_mut_slice()[self.layout.range(0)].copy_from_slice(w.as_slice());
        v
    }

    fn apply_b(&self, x: &DVector<f64>) -> DVector<f64> {
        let x1 = self.mat(self.layout.block(x, 0));
        let x2 = DVector::from_column_slice(self.layout.block(x, 1));
        let x3 = self.mat(self.layout.block(x, 2));
        let out = self.q.apply_e_adjoint(&x2) - self.q.apply_h(&x1) + x3;
        DVector::from_column_slice(out.as_slice())
    }

    fn apply_b_adjoint(&self, y: &DVector<f64>) -> DVector<f64> {
        let ym = self.mat(y.as_slice());
        let hy = self.q.apply_h(&ym);
        self.pack(&(-hy), &self.q.apply_e(&ym), &ym)
    }

    fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    fn linear_cost(&self) -> &DVector<f64> {
        &self.cost
    }

    fn h_value(&self, w: &DVector<f64>) -> f64 {
        let wm = self.mat(w.as_slice());
        0.5 * wm.dot(&self.q.apply_h(&wm))
    }

    fn grad_h(&self, w: &DVector<f64>) -> DVector<f64> {
        DVector::from_column_slice(self.q.apply_h(&self.mat(w.as_slice())).as_slice())
    }

    fn h_star_value(&self, w: &DVector<f64>) -> ExtReal {
        let wm = self.mat(w.as_slice());
        let off = (&wm - self.q.project_range_h(&wm)).amax();
        if off > FEASIBILITY_TOL {
            return ExtReal::PosInf { violation: off };
        }
        ExtReal::Finite(0.5 * wm.dot(&self.q.apply_h_pinv(&wm)))
    }

    fn grad_h_star(&self, w: &DVector<f64>) -> DVector<f64> {
        DVector::from_column_slice(self.q.apply_h_pinv(&self.mat(w.as_slice())).as_slice())
    }
}
