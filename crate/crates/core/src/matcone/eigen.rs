use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::sym::symmetrize_in_place;
use super::{MatconeError, Result, SymMatrix};

const MAX_SWEEPS: usize = 10_000;

/// Spectral decomposition `M = P diag(values) P^T` with ascending values.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `||M||_2` of the decomposed matrix.
    pub fn spectral_norm(&self) -> f64 {
        self.values.amax()
    }

    /// Eigenvalues with magnitude at or below this count as zero.
    pub fn zero_threshold(&self) -> f64 {
        1e-14 * (1.0 + self.spectral_norm())
    }

    /// `P diag(f(values)) P^T`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let n = self.order();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            scaled.column_mut(j).scale_mut(fj);
        }
        let mut out = &scaled * self.vectors.transpose();
        symmetrize_in_place(n, out.as_mut_slice());
        out
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.map_values(|l| l)
    }

    pub fn positive_part(&self) -> DMatrix<f64> {
        self.map_values(|l| l.max(0.0))
    }
}

/// Eigendecomposition with ascending eigenvalues.
pub fn sym_eigen(m: &SymMatrix) -> Result<EigenDecomposition> {
    eigen_of_slice(m.order(), m.as_slice())
}

/// `Pi_{S^n_+}(M)`.
pub fn project_psd(m: &SymMatrix) -> Result<SymMatrix> {
    let n = m.order();
    let mut out = vec![0.0; n * n];
    project_psd_slice(n, m.as_slice(), &mut out)?;
    Ok(SymMatrix::symmetrized(DMatrix::from_vec(n, n, out)))
}

/// Decomposes a column-major `n*n` slice, symmetrizing first.
pub(crate) fn eigen_of_slice(n: usize, data: &[f64]) -> Result<EigenDecomposition> {
    if data.len() != n * n {
        return Err(MatconeError::DimensionMismatch { expected: n * n, found: data.len() });
    }
    match n {
        1 => Ok(EigenDecomposition { values: DVector::from_element(1, data[0]), vectors: DMatrix::identity(1, 1) }),
        2 => Ok(eigen_2x2(data[0], 0.5 * (data[1] + data[2]), data[3])),
        _ => {
            let mut m = DMatrix::from_column_slice(n, n, data);
            symmetrize_in_place(n, m.as_mut_slice());
            let eig =
                SymmetricEigen::try_new(m, f64::EPSILON, MAX_SWEEPS).ok_or(MatconeError::NoConvergence { order: n })?;
            Ok(sorted(eig.eigenvalues, eig.eigenvectors))
        }
    }
}

fn sorted(values: DVector<f64>, vectors: DMatrix<f64>) -> EigenDecomposition {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let values = DVector::from_iterator(n, idx.iter().map(|&i| values[i]));
    let mut p = DMatrix::zeros(n, n);
    for (dst, &src) in idx.iter().enumerate() {
        p.set_column(dst, &vectors.column(src));
    }
    EigenDecomposition { values, vectors: p }
}

/// One Jacobi rotation diagonalizes a symmetric 2x2 matrix exactly.
fn eigen_2x2(a: f64, b: f64, d: f64) -> EigenDecomposition {
    let (c, s, l1, l2) = if b == 0.0 {
        (1.0, 0.0, a, d)
    } else {
        let tau = (d - a) / (2.0 * b);
        let t =
            if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
        let c = 1.0 / (1.0 + t * t).sqrt();
        (c, t * c, a - t * b, d + t * b)
    };
    // columns (c, -s) and (s, c) carry l1 and l2
    let (values, vectors) = if l1 <= l2 { ([l1, l2], [c, -s, s, c]) } else { ([l2, l1], [s, c, c, -s]) };
    EigenDecomposition {
        values: DVector::from_column_slice(&values),
        vectors: DMatrix::from_column_slice(2, 2, &vectors),
    }
}

/// Writes `Pi_{S^n_+}` of a column-major slice into `out`.
pub(crate) fn project_psd_slice(n: usize, input: &[f64], out: &mut [f64]) -> Result<()> {
    if out.len() != n * n {
        return Err(MatconeError::DimensionMismatch { expected: n * n, found: out.len() });
    }
    let eig = eigen_of_slice(n, input)?;
    if eig.values[0] >= 0.0 {
        out.copy_from_slice(input);
        symmetrize_in_place(n, out);
        return Ok(());
    }
    if eig.values[n - 1] <= 0.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        return Ok(());
    }
    out.copy_from_slice(eig.positive_part().as_slice());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        SymMatrix::symmetrized(&m + m.transpose())
    }

    fn check_invariants(m: &SymMatrix, eig: &EigenDecomposition) {
        let n = m.order();
        for i in 1..n {
            assert!(eig.values[i - 1] <= eig.values[i]);
        }
        let rec = (eig.reconstruct() - m.as_matrix()).norm();
        assert!(rec <= 1e-10 * (1.0 + m.frobenius_norm()), "reconstruction {rec:e}");
        let orth = (eig.vectors.transpose() * &eig.vectors - DMatrix::identity(n, n)).norm();
        assert!(orth <= 1e-10, "orthonormality {orth:e}");
    }

    #[test]
    fn identity_and_diagonal() {
        let eig = sym_eigen(&SymMatrix::identity(2)).unwrap();
        assert_eq!(eig.values.as_slice(), &[1.0, 1.0]);
        let d = SymMatrix::from_diagonal(&[-3.0, 2.0]);
        let eig = sym_eigen(&d).unwrap();
        assert_eq!(eig.values.as_slice(), &[-3.0, 2.0]);
        check_invariants(&d, &eig);
        let d = SymMatrix::from_diagonal(&[2.0, -3.0]);
        let eig = sym_eigen(&d).unwrap();
        assert_eq!(eig.values.as_slice(), &[-3.0, 2.0]);
        assert_eq!(eig.vectors[(1, 0)].abs(), 1.0);
        check_invariants(&d, &eig);
    }

    /// Real roots of the characteristic polynomial, found by bisection on
    /// sign changes of `det(M - tI)` over a fine grid.
    fn char_poly_roots(m: &DMatrix<f64>) -> Vec<f64> {
        let n = m.nrows();
        let det = |t: f64| (m - DMatrix::<f64>::identity(n, n) * t).determinant();
        let r = m.norm() + 1.0;
        let steps = 20_000;
        let mut roots = Vec::new();
        let h = 2.0 * r / steps as f64;
        for k in 0..steps {
            let (mut lo, mut hi) = (-r + k as f64 * h, -r + (k + 1) as f64 * h);
            let (flo, fhi) = (det(lo), det(hi));
            if flo == 0.0 {
                roots.push(lo);
                continue;
            }
            if flo * fhi < 0.0 {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if det(lo) * det(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
        roots
    }

    #[test]
    fn small_orders_match_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3 {
            for _ in 0..5 {
                let m = random_sym(n, &mut rng);
                let eig = sym_eigen(&m).unwrap();
                check_invariants(&m, &eig);
                let roots = char_poly_roots(m.as_matrix());
                assert_eq!(roots.len(), n, "expected distinct roots for a random matrix");
                for (r, l) in roots.iter().zip(eig.values.iter()) {
                    assert!((r - l).abs() <= 1e-9, "{r} vs {l}");
                }
            }
        }
    }

    #[test]
    fn five_by_five_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_sym(5, &mut rng);
        let eig = sym_eigen(&m).unwrap();
        check_invariants(&m, &eig);
        for j in 0..5 {
            let v = eig.vectors.column(j);
            let res = (m.as_matrix() * v - v * eig.values[j]).norm();
            assert!(res <= 1e-12);
        }
    }

    #[test]
    fn two_by_two_closed_form_is_accurate_for_tiny_coupling() {
        for &(a, b, d) in &[(1.0, 1e-300, 1.0), (1.0, 1e-9, 1.0 + 1e-12), (-5.0, 3.0, 5.0), (0.0, 1.0, 0.0)] {
            let m = SymMatrix::from_row_slice(2, &[a, b, b, d]).unwrap();
            check_invariants(&m, &sym_eigen(&m).unwrap());
        }
    }

    #[test]
    fn psd_projection_examples() {
        let p = project_psd(&SymMatrix::from_diagonal(&[1.0, -1.0])).unwrap();
        assert_eq!(p, SymMatrix::from_diagonal(&[1.0, 0.0]));
        let m = SymMatrix::from_row_slice(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let p = project_psd(&m).unwrap();
        for v in p.as_slice() {
            assert!((v - 0.5).abs() < 1e-15);
        }
    }
}
