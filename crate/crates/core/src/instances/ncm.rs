use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matcone::{sym_eigen, SymMatrix};
use crate::qsdp::{EMap, HOperator, QsdpData};

use super::{InstanceError, Result};

/// Off-diagonal noise level added to the factor-model correlation matrix.
const NOISE: f64 = 0.15;

/// The H-weighted nearest correlation matrix problem for a 0/1 `mask`:
/// `max -1/2 ||mask o (X - G)||^2  s.t.  diag(X) = 1, X psd` up to a constant.
///
/// Since `mask o mask = mask`, `H` is the Hadamard map with weights `mask`.
pub fn build_ncm(g: &SymMatrix, mask: &SymMatrix) -> Result<QsdpData> {
    let n = g.order();
    if mask.order() != n {
        return Err(InstanceError::MaskShapeMismatch { g: n, mask: mask.order() });
    }
    let m = mask.as_matrix();
    if m.iter().any(|v| *v != 0.0 && *v != 1.0) {
        return Err(InstanceError::InvariantViolation("mask entries must be 0 or 1".into()));
    }
    if let Some(i) = (0..n).find(|&i| m[(i, i)] != 1.0) {
        return Err(InstanceError::NonUnitDiagonalMask { index: i });
    }
    let c = mask.hadamard(g).scale(-1.0);
    Ok(QsdpData::new(HOperator::Hadamard { weights: mask.clone() }, EMap::Diagonal, c, DVector::from_element(n, 1.0))?)
}

/// Seeded synthetic NCM data `(G, mask)`.
///
/// `G` is a factor-model correlation matrix plus symmetric Gaussian noise,
/// clipped to `[-1, 1]` with unit diagonal; it is made indefinite when the
/// noise alone did not. The mask zeroes exactly `round(f n(n-1)/2)`
/// off-diagonal pairs.
pub fn gen_random_ncm(n: usize, seed: u64, missing_fraction: f64) -> Result<(SymMatrix, SymMatrix)> {
    if !(0.0..1.0).contains(&missing_fraction) {
        return Err(InstanceError::BadFraction(missing_fraction));
    }
    if n == 0 {
        return Err(InstanceError::InvariantViolation("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = (n / 10).max(2);
    let f: DMatrix<f64> = DMatrix::from_fn(n, rank, |_, _| StandardNormal.sample(&mut rng));
    let sigma: DMatrix<f64> = &f * f.transpose() + DMatrix::<f64>::identity(n, n) * 0.1;
    let mut g = DMatrix::from_fn(n, n, |i, j| sigma[(i, j)] / (sigma[(i, i)] * sigma[(j, j)]).sqrt());
    for j in 0..n {
        for i in 0..j {
            let z: f64 = StandardNormal.sample(&mut rng);
            let v = (g[(i, j)] + NOISE * z).clamp(-1.0, 1.0);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
        g[(j, j)] = 1.0;
    }
    let lmin = sym_eigen(&SymMatrix::symmetrized(g.clone()))?.values[0];
    if n > 1 && lmin >= 0.0 {
        // Shift below zero, then rescale back to unit diagonal.
        let tau = (1.05 * lmin).clamp(1e-3, 0.5);
        for j in 0..n {
            for i in 0..n {
                g[(i, j)] = if i == j { 1.0 } else { (g[(i, j)] / (1.0 - tau)).clamp(-1.0, 1.0) };
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    pairs.shuffle(&mut rng);
    let zeros = (missing_fraction * pairs.len() as f64).round() as usize;
    let mut mask = DMatrix::from_element(n, n, 1.0);
    for &(i, j) in &pairs[..zeros] {
        mask[(i, j)] = 0.0;
        mask[(j, i)] = 0.0;
    }
    Ok((SymMatrix::symmetrized(g), SymMatrix::symmetrized(mask)))
}
