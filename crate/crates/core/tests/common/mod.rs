#![allow(dead_code)]

use conic_alm::instances::{build_ncm, gen_random_ncm};
use conic_alm::matcone::SymMatrix;
use conic_alm::qsdp::{psi_eval, QsdpData};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ncm(n: usize, seed: u64, missing: f64) -> QsdpData {
    let (g, mask) = gen_random_ncm(n, seed, missing).unwrap();
    build_ncm(&g, &mask).unwrap()
}

pub fn gauss_sym(r: &mut ChaCha8Rng, n: usize, scale: f64) -> DMatrix<f64> {
    let a: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(r));
    (&a + a.transpose()) * (0.5 * scale)
}

pub fn gauss_vec(r: &mut ChaCha8Rng, m: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(m, |_, _| {
        let z: f64 = StandardNormal.sample(r);
        scale * z
    })
}

/// Random PSD matrix `B B^T / n` scaled by `scale`.
pub fn random_psd(r: &mut ChaCha8Rng, n: usize, scale: f64) -> DMatrix<f64> {
    let b: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(r));
    &b * b.transpose() * (scale / n as f64)
}

/// Random point `(x1, x2, X_k, sigma)` with `x1` in `Ran(H)`.
pub fn random_point(q: &QsdpData, r: &mut ChaCha8Rng) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>, f64) {
    let x1 = q.project_range_h(&gauss_sym(r, q.n(), 1.0));
    let x2 = gauss_vec(r, q.m(), 1.0);
    let xk = random_psd(r, q.n(), 1.0);
    let sigma = 10f64.powf(r.random_range(-1.0..1.5));
    (x1, x2, xk, sigma)
}

pub fn sym(m: &DMatrix<f64>) -> SymMatrix {
    SymMatrix::symmetrized(m.clone())
}

/// Worst relative error of `psi_grad` against central differences over
/// `points` seeded points. Off-diagonal coordinates move both mirrored
/// entries, so their difference quotient is twice the gradient entry.
pub fn fd_gradient_worst(q: &QsdpData, seed: u64, points: usize, h: f64) -> f64 {
    let mut r = rng(seed);
    let n = q.n();
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let (x1, x2, xk, sigma) = random_point(q, &mut r);
        let ev = psi_eval(q, &sym(&x1), &x2, &sym(&xk), sigma).unwrap();
        let psi = |a: &DMatrix<f64>, b: &DVector<f64>| psi_eval(q, &sym(a), b, &sym(&xk), sigma).unwrap().value;
        let mut fd1 = DMatrix::zeros(n, n);
        let support = q.project_range_h(&DMatrix::from_element(n, n, 1.0));
        for j in 0..n {
            for i in 0..=j {
                if support[(i, j)] == 0.0 {
                    continue;
                }
                let mut d = DMatrix::zeros(n, n);
                d[(i, j)] = h;
                d[(j, i)] = h;
                let quot = (psi(&(&x1 + &d), &x2) - psi(&(&x1 - &d), &x2)) / (2.0 * h);
                let v = if i == j { quot } else { 0.5 * quot };
                fd1[(i, j)] = v;
                fd1[(j, i)] = v;
            }
        }
        let mut fd2 = DVector::zeros(q.m());
        for i in 0..q.m() {
            let mut d = DVector::zeros(q.m());
            d[i] = h;
            fd2[i] = (psi(&x1, &(&x2 + &d)) - psi(&x1, &(&x2 - &d))) / (2.0 * h);
        }
        let err = ((&fd1 - &ev.grad1).norm_squared() + (&fd2 - &ev.grad2).norm_squared()).sqrt();
        worst = worst.max(err / ev.grad_norm().max(1e-12));
    }
    worst
}
