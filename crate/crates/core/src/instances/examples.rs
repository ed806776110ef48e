use nalgebra::{DMatrix, DVector};

use crate::cccp::{DenseCccp, Oracle, SmoothTerm};
use crate::matcone::{sym_eigen, BlockShape, ConeBlock, ConeProduct, ProxSpec, SymMatrix};

/// The 2x2 matrix defining the quadratic of the first example.
pub fn example1_weight() -> SymMatrix {
    SymMatrix::from_row_slice(2, &[1.5, -2.0, -2.0, 3.0]).expect("constant is symmetric")
}

fn spectral_power(m: &SymMatrix, p: f64) -> DMatrix<f64> {
    sym_eigen(m).expect("2x2 eigendecomposition").map_values(|l| l.powf(p))
}

/// First example: an SDP over `S^2` whose dual has a unique solution.
///
/// With `W = [[3/2, -2], [-2, 3]]`, `d = W^{-1/2} (5/2, -1)` and `E` the
/// all-ones matrix, the problem
///
/// ```text
/// minimize <I, X> + 1/2 ||W^{1/2} (X11, X22) - d||^2   s.t.  <E, X> <= 1,  X psd
/// ```
///
/// is posed with the residual lifted into its own variable `z`, so the
/// multiplier of the residual equation is part of the dual iterate:
///
/// ```text
/// x = (X, z),  h(z) = 1/2 ||z||^2,  c = (I, 0),  p = delta_psd(X)
/// Bx = (W^{1/2} (X11, X22) - z, <E, X>),  b = (d, 1),  Q = {0}^2 x R_-
/// ```
pub fn build_example1() -> DenseCccp {
    let w = example1_weight();
    let wh = spectral_power(&w, 0.5);
    let d = spectral_power(&w, -0.5) * DVector::from_column_slice(&[2.5, -1.0]);
    // flat primal layout: X11, X21, X12, X22, z1, z2
    let mut a = DMatrix::zeros(2, 6);
    a[(0, 4)] = 1.0;
    a[(1, 5)] = 1.0;
    let mut bmat = DMatrix::zeros(3, 6);
    for r in 0..2 {
        bmat[(r, 0)] = wh[(r, 0)];
        bmat[(r, 3)] = wh[(r, 1)];
        bmat[(r, 4 + r)] = -1.0;
    }
    for c in 0..4 {
        bmat[(2, c)] = 1.0;
    }
    let b = DVector::from_column_slice(&[d[0], d[1], 1.0]);
    let c = DVector::from_column_slice(&[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    DenseCccp::new(
        vec![BlockShape::Sym(2), BlockShape::Vector(2)],
        vec![ProxSpec::IndicatorPsd(2), ProxSpec::ZeroFunction],
        ConeProduct::new(vec![ConeBlock::Zero(2), ConeBlock::Nonpos(1)]).expect("nonempty blocks"),
        a,
        bmat,
        b,
        c,
        SmoothTerm::Quadratic { shift: DVector::zeros(2) },
    )
    .expect("consistent dimensions")
}

/// Closed-form solution of the first example:
/// `X* = diag(1, 0)`, `z* = -W^{-1/2}(1, 1)`, `y* = (z*, 0)`, optimal value `19/2`.
pub fn example1_solution() -> (DVector<f64>, DVector<f64>, f64) {
    let z = -(spectral_power(&example1_weight(), -0.5) * DVector::from_column_slice(&[1.0, 1.0]));
    let x = DVector::from_column_slice(&[1.0, 0.0, 0.0, 0.0, z[0], z[1]]);
    let y = DVector::from_column_slice(&[z[0], z[1], 0.0]);
    (x, y, 9.5)
}

pub fn example1_oracle() -> Oracle {
    let (_, y, v) = example1_solution();
    Oracle { y_star: Some(y), optimal_value: Some(v) }
}

/// Second example: a feasible SDP whose dual solution set is a ray.
///
/// ```text
/// minimize 0   s.t.  x1 + x2 [[0, 1], [1, -1]] = diag(0, 1),  x1 psd
/// ```
///
/// The only feasible point is `x1 = diag(0, 1)`, `x2 = 0`. Its multipliers
/// form `{Y = diag(t, 0) : t >= 0}`, i.e. `s = -Y` ranges over
/// `{diag(t, 0) : t <= 0}`. The `S^2` constraint uses the full 4-entry layout.
pub fn build_example2() -> DenseCccp {
    let mut bmat = DMatrix::zeros(4, 5);
    for i in 0..4 {
        bmat[(i, i)] = 1.0;
    }
    // x2 * [[0, 1], [1, -1]] in column-major order
    bmat[(1, 4)] = 1.0;
    bmat[(2, 4)] = 1.0;
    bmat[(3, 4)] = -1.0;
    DenseCccp::new(
        vec![BlockShape::Sym(2), BlockShape::Vector(1)],
        vec![ProxSpec::IndicatorPsd(2), ProxSpec::ZeroFunction],
        ConeProduct::new(vec![ConeBlock::Zero(4)]).expect("nonempty blocks"),
        DMatrix::zeros(0, 5),
        bmat,
        DVector::from_column_slice(&[0.0, 0.0, 0.0, 1.0]),
        DVector::zeros(5),
        SmoothTerm::Zero,
    )
    .expect("consistent dimensions")
}

/// Distance from a multiplier `y` of the second example to its solution set
/// `{diag(t, 0) : t >= 0}` (in the full 4-entry layout).
pub fn example2_dual_distance(y: &DVector<f64>) -> f64 {
    let t = y[0].max(0.0);
    ((y[0] - t).powi(2) + y[1].powi(2) + y[2].powi(2) + y[3].powi(2)).sqrt()
}
