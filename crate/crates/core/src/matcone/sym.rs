use nalgebra::{DMatrix, DVector};

use super::{MatconeError, Result};

/// Relative symmetry tolerance: `max|M_ij - M_ji| <= TOL * (1 + max|M_ij|)`.
const SYMMETRY_TOL: f64 = 1e-12;

/// Dense symmetric matrix. Entries are exactly symmetric after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

/// Largest `|M_ij - M_ji|` of a square matrix.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// `M <- (M + M^T) / 2` on a column-major `n*n` slice.
pub fn symmetrize_in_place(n: usize, data: &mut [f64]) {
    debug_assert_eq!(data.len(), n * n);
    for j in 0..n {
        for i in (j + 1)..n {
            let avg = 0.5 * (data[i + j * n] + data[j + i * n]);
            data[i + j * n] = avg;
            data[j + i * n] = avg;
        }
    }
}

impl SymMatrix {
    /// Validates the symmetry invariant, then symmetrizes.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(MatconeError::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        let scale = 1.0 + m.amax();
        let max_asym = asymmetry(&m);
        if !(max_asym <= SYMMETRY_TOL * scale) {
            return Err(MatconeError::NonSymmetric { max_asym });
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without checking. Panics on a non-square input.
    pub fn symmetrized(mut m: DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "symmetric matrix must be square");
        let n = m.nrows();
        symmetrize_in_place(n, m.as_mut_slice());
        SymMatrix(m)
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(MatconeError::DimensionMismatch { expected: n * n, found: data.len() });
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    /// Column-major `n*n` slice, as stored in flat problem vectors.
    pub fn from_column_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(MatconeError::DimensionMismatch { expected: n * n, found: data.len() });
        }
        Self::new(DMatrix::from_column_slice(n, n, data))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Trace inner product.
    pub fn inner(&self, other: &SymMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn diagonal(&self) -> DVector<f64> {
        self.0.diagonal()
    }

    pub fn scale(&self, a: f64) -> SymMatrix {
        SymMatrix(&self.0 * a)
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 - &other.0)
    }

    /// Entrywise product; symmetric inputs give a symmetric output.
    pub fn hadamard(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix(self.0.component_mul(&other.0))
    }
}

impl AsRef<DMatrix<f64>> for SymMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}
