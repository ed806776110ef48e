mod common;

use common::*;
use conic_alm::cccp::{tilde_point, AlmConfig, CccpProblem, Oracle};
use conic_alm::matcone::SymMatrix;
use conic_alm::qsdp::*;
use nalgebra::{DMatrix, DVector};

fn tight(g: f64) -> impl FnMut(&NewtonProbe) -> bool {
    move |p: &NewtonProbe| p.eval.grad_norm() < g
}

fn inner(a: &DMatrix<f64>, va: &DMatrix<f64>, b: &DVector<f64>, vb: &DVector<f64>) -> f64 {
    a.dot(va) + b.dot(vb)
}

#[test]
fn gradient_matches_central_differences() {
    let q = ncm(10, 3, 0.3);
    let worst = fd_gradient_worst(&q, 11, 20, 1e-6);
    assert!(worst <= 1e-6, "relative error {worst:e}");
}

#[test]
fn data_operators_are_adjoint_and_psd() {
    let q = ncm(50, 5, 0.3);
    let mut r = rng(1);
    for _ in 0..20 {
        let (d1, d2) = (gauss_sym(&mut r, 50, 1.0), gauss_sym(&mut r, 50, 1.0));
        assert!(d1.dot(&q.apply_h(&d1)) >= -1e-10 * d1.norm_squared());
        assert!((d1.dot(&q.apply_h(&d2)) - q.apply_h(&d1).dot(&d2)).abs() <= 1e-10 * (1.0 + d1.norm() * d2.norm()));
        let y = gauss_vec(&mut r, 50, 1.0);
        assert!(
            (q.apply_e(&d1).dot(&y) - d1.dot(&q.apply_e_adjoint(&y))).abs() <= 1e-10 * (1.0 + d1.norm() * y.norm())
        );
    }
}

#[test]
fn generalized_hessian_is_symmetric_and_psd() {
    let q = ncm(8, 2, 0.3);
    let mut r = rng(8);
    for _ in 0..100 {
        let (x1, x2, xk, sigma) = random_point(&q, &mut r);
        let (sx1, sxk) = (sym(&x1), sym(&xk));
        let cache = NewtonCache::new(&q, &sx1, &x2, &sxk, sigma).unwrap();
        assert!(cache.omega.iter().all(|w| (0.0..=1.0).contains(w)));
        assert!((&cache.omega - cache.omega.transpose()).amax() == 0.0);
        let (u1, u2) = (gauss_sym(&mut r, 8, 1.0), gauss_vec(&mut r, 8, 1.0));
        let (v1, v2) = (gauss_sym(&mut r, 8, 1.0), gauss_vec(&mut r, 8, 1.0));
        let (vu1, vu2) = gen_hessian_apply(&q, &cache, &sx1, &x2, &sxk, &sym(&u1), &u2).unwrap();
        let (vv1, vv2) = gen_hessian_apply(&q, &cache, &sx1, &x2, &sxk, &sym(&v1), &v2).unwrap();
        let (vu1, vv1) = (vu1.into_matrix(), vv1.into_matrix());
        let scale = 1.0 + sigma * (u1.norm() + u2.norm()) * (v1.norm() + v2.norm());
        assert!((inner(&u1, &vv1, &u2, &vv2) - inner(&vu1, &v1, &vu2, &v2)).abs() <= 1e-10 * scale);
        assert!(inner(&u1, &vu1, &u2, &vu2) >= -1e-10 * scale);
    }
}

#[test]
fn hessian_in_smooth_and_vanishing_regimes() {
    let q = ncm(6, 4, 0.3);
    let mut r = rng(6);
    let (x1, x2, _, sigma) = random_point(&q, &mut r);
    let (d1, d2) = (gauss_sym(&mut r, 6, 1.0), gauss_vec(&mut r, 6, 1.0));
    let jd = q.apply_e_adjoint(&d2) - q.apply_h(&d1);

    // M positive definite: the projection is the identity near M.
    let big = DMatrix::identity(6, 6) * 1e3;
    let cache = NewtonCache::new(&q, &sym(&x1), &x2, &sym(&big), sigma).unwrap();
    assert!(cache.omega.iter().all(|w| *w == 1.0));
    let (v1, v2) = cache.apply(&q, &d1, &d2);
    let want1 = q.apply_h(&d1) - q.apply_h(&jd) * sigma;
    let want2 = q.apply_e(&jd) * sigma;
    assert!((v1 - want1).amax() <= 1e-9 * (1.0 + sigma * jd.amax()));
    assert!((v2 - want2).amax() <= 1e-9 * (1.0 + sigma * jd.amax()));

    // M negative definite: projection vanishes, gradient is (H x1, -b).
    let neg = -big;
    let ev = psi_eval(&q, &sym(&x1), &x2, &sym(&neg), sigma).unwrap();
    assert_eq!(ev.x_plus, DMatrix::zeros(6, 6));
    assert!((&ev.grad1 - q.apply_h(&x1)).amax() == 0.0);
    assert!((&ev.grad2 + q.b()).amax() == 0.0);
    let cache = NewtonCache::from_eval(&ev, sigma);
    assert!(cache.omega.iter().all(|w| *w == 0.0));
    let (v1, v2) = cache.apply(&q, &d1, &d2);
    assert!((v1 - q.apply_h(&d1)).amax() == 0.0);
    assert!(v2.amax() == 0.0);
}

#[test]
fn stale_cache_and_range_violation_are_reported() {
    let q = ncm(6, 4, 0.5);
    let mut r = rng(2);
    let (x1, x2, xk, sigma) = random_point(&q, &mut r);
    let (sx1, sxk) = (sym(&x1), sym(&xk));
    let cache = NewtonCache::new(&q, &sx1, &x2, &sxk, sigma).unwrap();
    let moved = &x2 + DVector::from_element(6, 1e-3);
    let d = SymMatrix::zeros(6);
    let err = gen_hessian_apply(&q, &cache, &sx1, &moved, &sxk, &d, &x2).unwrap_err();
    assert!(matches!(err, QsdpError::StaleCache { .. }), "{err}");

    let support = q.project_range_h(&DMatrix::from_element(6, 6, 1.0));
    let (i, j) = (0..6).flat_map(|j| (0..6).map(move |i| (i, j))).find(|&(i, j)| support[(i, j)] == 0.0).unwrap();
    let mut off = x1.clone();
    off[(i, j)] = 0.5;
    off[(j, i)] = 0.5;
    let err = psi_eval(&q, &sym(&off), &x2, &sxk, sigma).unwrap_err();
    assert!(matches!(err, QsdpError::RangeViolation { .. }), "{err}");
}

/// `n = 1`, `H = 0`, `E = trace`: `psi(x2) = -b x2 + ((X_k + s(x2 - c))_+^2 - X_k^2) / 2s`,
/// minimized at `x2 = c + (b - X_k) / s` when `b > 0`.
#[test]
fn scalar_trace_problem_has_closed_form() {
    let (b, c, xk, s) = (2.0, 0.7, 0.5, 3.0);
    let q = QsdpData::new(
        HOperator::Hadamard { weights: SymMatrix::zeros(1) },
        EMap::Rows(vec![SymMatrix::identity(1)]),
        SymMatrix::from_diagonal(&[c]),
        DVector::from_element(1, b),
    )
    .unwrap();
    let xkm = DMatrix::from_element(1, 1, xk);
    for x2 in [-3.0, 0.0, 0.4, 2.0] {
        let ev = psi_eval(&q, &SymMatrix::zeros(1), &DVector::from_element(1, x2), &sym(&xkm), s).unwrap();
        let arg: f64 = xk + s * (x2 - c);
        let want = -b * x2 + (arg.max(0.0).powi(2) - xk * xk) / (2.0 * s);
        assert!((ev.value - want).abs() <= 1e-14 * (1.0 + want.abs()));
        assert!((ev.grad2[0] - (arg.max(0.0) - b)).abs() <= 1e-14 * (1.0 + b));
        assert_eq!(ev.grad1[(0, 0)], 0.0);
    }
    let out = newton_cg_solve(
        &q,
        &xkm,
        s,
        DMatrix::zeros(1, 1),
        DVector::zeros(1),
        &mut tight(1e-13),
        &NewtonConfig::default(),
    )
    .unwrap();
    assert!((out.x2[0] - (c + (b - xk) / s)).abs() <= 1e-10);
    assert!((out.eval.x_plus[(0, 0)] - b).abs() <= 1e-10);
}

#[test]
fn first_ncm_subproblem_converges_fast_with_exact_e() {
    let q = ncm(10, 1, 0.3);
    let xk = DMatrix::zeros(10, 10);
    let out = newton_cg_solve(
        &q,
        &xk,
        1.0,
        DMatrix::zeros(10, 10),
        DVector::zeros(10),
        &mut tight(1e-12),
        &NewtonConfig::default(),
    )
    .unwrap();
    assert!(out.iterations <= 30, "{} Newton steps", out.iterations);
    assert!(*out.grad_norms.last().unwrap() < 1e-12);
    assert!(out.psi_values.windows(2).all(|w| w[1] < w[0]), "psi not strictly decreasing: {:?}", out.psi_values);
    assert!(out.cg_met_tol.iter().all(|m| *m), "CG missed its tolerance: {:?}", out.cg_met_tol);

    // x3 from the accepted pair is reproduced by re-evaluating at that pair.
    let again = psi_eval(&q, &sym(&out.x1), &out.x2, &sym(&xk), 1.0).unwrap();
    assert!((again.x3(1.0) - &out.x3).amax() <= 1e-14 * (1.0 + out.x3.amax()));

    let e = qsdp_e_vector(&q, &out.x1, &out.x2, &out.x3, &xk, 1.0).unwrap();
    assert!(e.norm() <= 1e-12, "||e|| = {:e}", e.norm());
}

#[test]
fn e_vector_matches_gradient_and_generic_path() {
    let q = ncm(10, 9, 0.3);
    let view = QsdpCccp::new(&q);
    let mut r = rng(10);
    for _ in 0..20 {
        let (x1, x2, xk, sigma) = random_point(&q, &mut r);
        let ev = psi_eval(&q, &sym(&x1), &x2, &sym(&xk), sigma).unwrap();
        let x3 = ev.x3(sigma);
        let e = qsdp_e_vector(&q, &x1, &x2, &x3, &xk, sigma).unwrap();
        assert!(e.distance_to(&ev.grad1, &ev.grad2) <= 1e-12 * (1.0 + ev.grad_norm()));

        let tp =
            tilde_point(&view, &view.pack(&x1, &x2, &x3), &DVector::from_column_slice(xk.as_slice()), sigma).unwrap();
        let n2 = 100;
        let g1 = DMatrix::from_column_slice(10, 10, &tp.e.as_slice()[..n2]);
        let g2 = DVector::from_column_slice(&tp.e.as_slice()[n2..n2 + 10]);
        let g3 = DMatrix::from_column_slice(10, 10, &tp.e.as_slice()[n2 + 10..]);
        let gap = ((g1 - &e.e1).norm_squared() + (g2 - &e.e2).norm_squared() + (g3 - &e.e3).norm_squared()).sqrt();
        assert!(gap <= 1e-10 * (1.0 + e.norm()), "paths differ by {gap:e}");
        assert_eq!(view.primal_dim(), 210);
    }
}

#[test]
fn criteria_edge_cases() {
    let q = ncm(5, 1, 0.2);
    let mut r = rng(3);
    let xk = random_psd(&mut r, 5, 1.0);
    let xn = random_psd(&mut r, 5, 1.0);
    let c = qsdp_criteria(&q, 2.0, &xn, &xk, 0.0, 3.0, 0.5, 0.5);
    assert!(c.pass_a && c.pass_b);
    let c = qsdp_criteria(&q, 2.0, &xk, &xk, 1e-300, 3.0, 0.5, 0.5);
    assert_eq!(c.thr_b, 0.0);
    assert!(!c.pass_b);
}

/// Runs four tightly solved outer steps on NCM `n = 10` and re-evaluates the
/// thresholds of the fourth from their defining formula.
#[test]
fn criteria_match_independent_evaluation_on_ncm() {
    let q = ncm(10, 2, 0.3);
    let cfg = AlmConfig::default();
    let ncfg = NewtonConfig::default();
    let (mut x1, mut x2) = (DMatrix::zeros(10, 10), DVector::zeros(10));
    let mut xk = DMatrix::zeros(10, 10);
    let mut sigma = 1.0;
    for k in 0..4 {
        let out = newton_cg_solve(&q, &xk, sigma, x1, x2, &mut tight(1e-6), &ncfg).unwrap();
        let xn = out.eval.x_plus.clone();
        if k == 3 {
            let x_norm = (out.x1.norm_squared() + out.x2.norm_squared() + out.x3.norm_squared()).sqrt();
            let g = out.eval.grad_norm();
            let (eps, eta) = (cfg.eps_k(k), cfg.eta_k(k));
            let dx = (&xn - &xk).norm();
            let hx = xn.component_mul(&q.project_range_h(&DMatrix::from_element(10, 10, 1.0))).norm();
            let m = (1.0 / (hx + dx / sigma + 1.0 / sigma)).min(1.0);
            let den = 1.0 + x_norm + xn.norm();
            let thr_a = eps * eps / sigma / den * m;
            let thr_b = eta * eta / sigma * dx * dx / den * m;
            let c = qsdp_criteria(&q, x_norm, &xn, &xk, g, sigma, eps, eta);
            assert!((c.thr_a - thr_a).abs() <= 1e-14 * thr_a);
            assert!((c.thr_b - thr_b).abs() <= 1e-14 * thr_b);
            assert_eq!(c.pass_a, g <= thr_a);
        }
        x1 = out.x1;
        x2 = out.x2;
        xk = xn;
        sigma *= 2.0;
    }
}

#[test]
fn kkt_residual_blocks() {
    let q = ncm(4, 3, 0.0);
    let mut x = DMatrix::identity(4, 4);
    x[(2, 2)] = 1.5;
    let z = DMatrix::zeros(4, 4);
    let res = qsdp_kkt_residual(&q, &z, &DVector::zeros(4), &z, &x).unwrap();
    let want = x.diagonal() - DVector::from_element(4, 1.0);
    assert_eq!(res.r2, want);
    assert!(res.r2.norm() > 0.0);
}

/// The second example as a QSDP with `H = 0`: primal `x3 + x2 A = diag(0, 1)`,
/// dual solutions `X = diag(t, 0)`, `t >= 0`.
#[test]
fn degenerate_example_has_zero_residual_on_solution_set() {
    let a = SymMatrix::from_row_slice(2, &[0.0, 1.0, 1.0, -1.0]).unwrap();
    let q = QsdpData::new(
        HOperator::Hadamard { weights: SymMatrix::zeros(2) },
        EMap::Rows(vec![a]),
        SymMatrix::from_diagonal(&[0.0, 1.0]),
        DVector::zeros(1),
    )
    .unwrap();
    let x3 = DMatrix::from_diagonal(&DVector::from_column_slice(&[0.0, 1.0]));
    for t in [0.0, 1.0, 2.5] {
        let xd = DMatrix::from_diagonal(&DVector::from_column_slice(&[t, 0.0]));
        let res = qsdp_kkt_residual(&q, &DMatrix::zeros(2, 2), &DVector::zeros(1), &x3, &xd).unwrap();
        assert_eq!(res.norm, 0.0, "t = {t}");
    }
}

#[test]
fn converged_ncm_solution_is_a_correlation_matrix() {
    let q = ncm(20, 4, 0.3);
    let cfg = AlmConfig { tol: 1e-8, ..AlmConfig::default() };
    let r = qsdp_alm_solve(&q, &cfg, &NewtonConfig::default(), &Oracle::default()).unwrap();
    assert!(r.converged());
    let res = qsdp_kkt_residual(&q, &r.x1, &r.x2, &r.x3, &r.x).unwrap();
    assert!(res.norm <= 1e-8);
    assert!((0..20).all(|i| (r.x[(i, i)] - 1.0).abs() <= 1e-8));
    let lmin = conic_alm::matcone::sym_eigen(&sym(&r.x)).unwrap().values[0];
    assert!(lmin >= -1e-9);
}
