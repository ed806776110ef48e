use nalgebra::{DMatrix, DVector};

use crate::matcone::{BlockShape, ConeProduct, ExtReal, Layout, ProxSpec, FEASIBILITY_TOL};

use super::{CccpError, CccpProblem, Result};

/// Smooth outer function `h`.
#[derive(Clone, Debug, PartialEq)]
pub enum SmoothTerm {
    /// `h = 0`; `h* = delta_{0}`.
    Zero,
    /// `h(w) = 1/2 ||w - shift||^2`; `h*(u) = 1/2 ||u||^2 + <shift, u>`.
    Quadratic { shift: DVector<f64> },
}

/// A problem whose linear maps are stored as dense matrices.
#[derive(Clone, Debug)]
pub struct DenseCccp {
    layout: Layout,
    prox: Vec<ProxSpec>,
    cone: ConeProduct,
    a: DMatrix<f64>,
    bmat: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
    smooth: SmoothTerm,
}

/// Pairs `(i*n+j, j*n+i)` of flat offsets that must agree inside symmetric blocks.
fn mirror_pairs(layout: &Layout) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (blk, shape) in layout.shapes().iter().enumerate() {
        if let BlockShape::Sym(n) = *shape {
            let off = layout.range(blk).start;
            for j in 0..n {
                for i in (j + 1)..n {
                    pairs.push((off + i + j * n, off + j + i * n));
                }
            }
        }
    }
    pairs
}

fn average_columns(m: &mut DMatrix<f64>, pairs: &[(usize, usize)]) {
    for &(p, q) in pairs {
        for r in 0..m.nrows() {
            let avg = 0.5 * (m[(r, p)] + m[(r, q)]);
            m[(r, p)] = avg;
            m[(r, q)] = avg;
        }
    }
}

fn average_rows(m: &mut DMatrix<f64>, pairs: &[(usize, usize)]) {
    for &(p, q) in pairs {
        for c in 0..m.ncols() {
            let avg = 0.5 * (m[(p, c)] + m[(q, c)]);
            m[(p, c)] = avg;
            m[(q, c)] = avg;
        }
    }
}

fn average_entries(v: &mut DVector<f64>, pairs: &[(usize, usize)]) {
    for &(p, q) in pairs {
        let avg = 0.5 * (v[p] + v[q]);
        v[p] = avg;
        v[q] = avg;
    }
}

fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(CccpError::DimensionMismatch { what, expected, found })
    }
}

impl DenseCccp {
    /// `a` maps the primal space to the smooth space, `bmat` maps it to the
    /// cone space. Symmetric blocks are symmetrized on ingestion: mirrored
    /// columns (primal side) and mirrored rows (cone side) are averaged.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        shapes: Vec<BlockShape>,
        prox: Vec<ProxSpec>,
        cone: ConeProduct,
        mut a: DMatrix<f64>,
        mut bmat: DMatrix<f64>,
        mut b: DVector<f64>,
        mut c: DVector<f64>,
        smooth: SmoothTerm,
    ) -> Result<Self> {
        let layout = Layout::new(shapes);
        let n = layout.dim();
        let m = cone.dim();
        check_dim("prox specs", layout.num_blocks(), prox.len())?;
        for (spec, shape) in prox.iter().zip(layout.shapes()) {
            if let Some(s) = spec.shape() {
                if s != *shape {
                    return Err(CccpError::InvalidProblem(format!("prox spec {spec:?} does not fit block {shape:?}")));
                }
            }
        }
        check_dim("A columns", n, a.ncols())?;
        check_dim("B columns", n, bmat.ncols())?;
        check_dim("B rows", m, bmat.nrows())?;
        check_dim("b", m, b.len())?;
        check_dim("c", n, c.len())?;
        match &smooth {
            SmoothTerm::Zero => {}
            SmoothTerm::Quadratic { shift } => check_dim("h shift", a.nrows(), shift.len())?,
        }
        let primal_pairs = mirror_pairs(&layout);
        let cone_pairs = mirror_pairs(cone.layout());
        average_columns(&mut a, &primal_pairs);
        average_columns(&mut bmat, &primal_pairs);
        average_rows(&mut bmat, &cone_pairs);
        average_entries(&mut b, &cone_pairs);
        average_entries(&mut c, &primal_pairs);
        Ok(DenseCccp { layout, prox, cone, a, bmat, b, c, smooth })
    }

    pub fn a_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b_matrix(&self) -> &DMatrix<f64> {
        &self.bmat
    }

    pub fn smooth_term(&self) -> &SmoothTerm {
        &self.smooth
    }
}

impl CccpProblem for DenseCccp {
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
        self.a.nrows()
    }

    fn apply_a(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x
    }

    fn apply_a_adjoint(&self, w: &DVector<f64>) -> DVector<f64> {
        self.a.tr_mul(w)
    }

    fn apply_b(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.bmat * x
    }

    fn apply_b_adjoint(&self, y: &DVector<f64>) -> DVector<f64> {
        self.bmat.tr_mul(y)
    }

    fn rhs(&self) -> &DVector<f64> {
        &self.b
    }

    fn linear_cost(&self) -> &DVector<f64> {
        &self.c
    }

    fn h_value(&self, w: &DVector<f64>) -> f64 {
        match &self.smooth {
            SmoothTerm::Zero => 0.0,
            SmoothTerm::Quadratic { shift } => 0.5 * (w - shift).norm_squared(),
        }
    }

    fn grad_h(&self, w: &DVector<f64>) -> DVector<f64> {
        match &self.smooth {
            SmoothTerm::Zero => DVector::zeros(w.len()),
            SmoothTerm::Quadratic { shift } => w - shift,
        }
    }

    fn h_star_value(&self, w: &DVector<f64>) -> ExtReal {
        match &self.smooth {
            SmoothTerm::Zero => {
                let v = w.amax();
                if v <= FEASIBILITY_TOL {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::PosInf { violation: v }
                }
            }
            SmoothTerm::Quadratic { shift } => ExtReal::Finite(0.5 * w.norm_squared() + shift.dot(w)),
        }
    }

    fn grad_h_star(&self, w: &DVector<f64>) -> DVector<f64> {
        match &self.smooth {
            SmoothTerm::Zero => DVector::zeros(w.len()),
            SmoothTerm::Quadratic { shift } => w + shift,
        }
    }
}
