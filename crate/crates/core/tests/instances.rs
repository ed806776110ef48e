mod common;

use std::fs;

use common::*;
use conic_alm::cccp::{AlmConfig, CccpProblem, Oracle};
use conic_alm::diagnostics::history_csv;
use conic_alm::instances::*;
use conic_alm::matcone::{sym_eigen, SymMatrix};
use conic_alm::qsdp::{qsdp_alm_solve, NewtonConfig, QsdpData};
use nalgebra::{DMatrix, DVector};

fn solve(q: &QsdpData, tol: f64) -> conic_alm::qsdp::QsdpSolveResult {
    let cfg = AlmConfig { tol, ..AlmConfig::default() };
    qsdp_alm_solve(q, &cfg, &NewtonConfig::default(), &Oracle::default()).unwrap()
}

fn valid_correlation(n: usize, seed: u64) -> SymMatrix {
    let mut r = rng(seed);
    let s = random_psd(&mut r, n, 1.0) + DMatrix::identity(n, n) * 0.1;
    SymMatrix::symmetrized(DMatrix::from_fn(n, n, |i, j| s[(i, j)] / (s[(i, i)] * s[(j, j)]).sqrt()))
}

#[test]
fn example1_weight_spectrum_and_square_root() {
    let w = example1_weight();
    let eig = sym_eigen(&w).unwrap();
    let disc = 73f64.sqrt();
    assert!((eig.values[0] - (9.0 - disc) / 4.0).abs() <= 1e-12);
    assert!((eig.values[1] - (9.0 + disc) / 4.0).abs() <= 1e-12);
    let root = eig.map_values(f64::sqrt);
    assert!((&root * &root - w.as_matrix()).amax() <= 1e-12);

    // The smooth map's data block restricted to (X11, X22) is W^{1/2}, so its Gram matrix is W.
    let p = build_example1();
    let mut a = DMatrix::zeros(2, 2);
    for (col, flat) in [0usize, 3].into_iter().enumerate() {
        let mut e = DVector::zeros(p.primal_dim());
        e[flat] = 1.0;
        a.set_column(col, &p.apply_b(&e).rows(0, 2));
    }
    assert!((a.transpose() * a - w.as_matrix()).amax() <= 1e-12);
}

#[test]
fn degenerate_example_feasibility_by_hand() {
    let p = build_example2();
    let sol = DVector::from_column_slice(&[0.0, 0.0, 0.0, 1.0, 0.0]);
    assert_eq!(p.apply_b(&sol) - p.rhs(), DVector::zeros(4));
    // (I, 0) misses only the (1, 1) entry, by 1.
    let probe = DVector::from_column_slice(&[1.0, 0.0, 0.0, 1.0, 0.0]);
    assert_eq!(p.apply_b(&probe) - p.rhs(), DVector::from_column_slice(&[1.0, 0.0, 0.0, 0.0]));
    for t in [0.0, 0.5, 3.0] {
        assert_eq!(example2_dual_distance(&DVector::from_column_slice(&[t, 0.0, 0.0, 0.0])), 0.0);
    }
    assert_eq!(example2_dual_distance(&DVector::from_column_slice(&[-2.0, 0.0, 0.0, 0.0])), 2.0);
}

#[test]
fn random_ncm_mask_and_data() {
    let (g, mask) = gen_random_ncm(50, 7, 0.3).unwrap();
    let zeros = mask.as_slice().iter().filter(|v| **v == 0.0).count();
    assert_eq!(zeros, 2 * (0.3f64 * 1225.0).round() as usize);
    assert!(mask.diagonal().iter().all(|v| *v == 1.0));
    assert!(g.diagonal().iter().all(|v| *v == 1.0));
    assert!(g.as_slice().iter().all(|v| (-1.0..=1.0).contains(v)));
    assert!(sym_eigen(&g).unwrap().values[0] < 0.0);
    assert_eq!(mask.as_matrix(), &mask.as_matrix().transpose());

    let again = gen_random_ncm(50, 7, 0.3).unwrap();
    assert_eq!((g.as_slice(), mask.as_slice()), (again.0.as_slice(), again.1.as_slice()));

    let (_, full) = gen_random_ncm(30, 2, 0.0).unwrap();
    assert!(full.as_slice().iter().all(|v| *v == 1.0));
}

#[test]
fn random_ncm_instance_invariants() {
    let q = ncm(50, 7, 0.3);
    let mut r = rng(50);
    for _ in 0..10 {
        let (d1, d2) = (gauss_sym(&mut r, 50, 1.0), gauss_sym(&mut r, 50, 1.0));
        assert!(d1.dot(&q.apply_h(&d1)) >= -1e-10 * d1.norm_squared());
        assert!((d1.dot(&q.apply_h(&d2)) - q.apply_h(&d1).dot(&d2)).abs() <= 1e-10 * d1.norm() * d2.norm());
        let y = gauss_vec(&mut r, 50, 1.0);
        assert!((q.apply_e(&d1).dot(&y) - d1.dot(&q.apply_e_adjoint(&y))).abs() <= 1e-10 * d1.norm() * y.norm());
    }
}

#[test]
fn two_by_two_nearest_correlation_matches_brute_force() {
    let g = SymMatrix::from_row_slice(2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
    let q = build_ncm(&g, &SymMatrix::symmetrized(DMatrix::from_element(2, 2, 1.0))).unwrap();
    // [[1, t], [t, 1]] is psd iff |t| <= 1.
    let best = (0..=200_000)
        .map(|i| -1.0 + i as f64 * 1e-5)
        .min_by(|a, b| (0.5 * (a - 2.0) * (a - 2.0)).total_cmp(&(0.5 * (b - 2.0) * (b - 2.0))))
        .unwrap();
    let r = solve(&q, 1e-9);
    assert!(r.converged());
    assert!((r.x[(0, 1)] - best).abs() <= 1e-6, "X12 = {}, brute force {best}", r.x[(0, 1)]);
}

#[test]
fn valid_correlation_with_full_mask_is_a_fixed_point() {
    let g = valid_correlation(12, 4);
    let q = build_ncm(&g, &SymMatrix::symmetrized(DMatrix::from_element(12, 12, 1.0))).unwrap();
    let r = solve(&q, 1e-10);
    assert!(r.converged());
    assert!(r.history.last().unwrap().kkt_res <= 1e-10);
    assert!((&r.x - g.as_matrix()).amax() <= 1e-8);
}

#[test]
fn build_ncm_rejects_bad_masks() {
    let g = SymMatrix::identity(3);
    let err = build_ncm(&g, &SymMatrix::identity(4)).unwrap_err();
    assert!(matches!(err, InstanceError::MaskShapeMismatch { g: 3, mask: 4 }), "{err}");
    let mut m = DMatrix::from_element(3, 3, 1.0);
    m[(1, 1)] = 0.0;
    let err = build_ncm(&g, &SymMatrix::symmetrized(m)).unwrap_err();
    assert!(matches!(err, InstanceError::NonUnitDiagonalMask { index: 1 }), "{err}");
    let err = build_ncm(&g, &SymMatrix::symmetrized(DMatrix::from_element(3, 3, 0.5))).unwrap_err();
    assert!(matches!(err, InstanceError::InvariantViolation(_)), "{err}");
    for f in [-0.1, 1.0, f64::NAN] {
        assert!(matches!(gen_random_ncm(5, 0, f), Err(InstanceError::BadFraction(_))));
    }
}

#[test]
fn manifest_round_trip_reproduces_history() {
    let dir = tempfile::tempdir().unwrap();
    let (g, mask) = gen_random_ncm(15, 3, 0.3).unwrap();
    let path = write_ncm_instance(dir.path(), "small", &g, &mask).unwrap();
    let (mf, inst) = load_instance(&path).unwrap();
    assert_eq!(mf.kind(), InstanceKind::Ncm);
    let Instance::Qsdp(loaded) = inst else { panic!("ncm loads as a quadratic SDP") };
    let direct = solve(&build_ncm(&g, &mask).unwrap(), 1e-8);
    let reloaded = solve(&loaded, 1e-8);
    assert_eq!(history_csv(&direct.history), history_csv(&reloaded.history));
}

#[test]
fn matrix_market_round_trip_is_exact() {
    let mut r = rng(12);
    let m = gauss_sym(&mut r, 7, 1.0) * std::f64::consts::PI;
    let text = matrix_market_string(&m);
    assert_eq!(parse_matrix_market(&text, "m.mtx".as_ref()).unwrap(), m);
    let coo = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 4\n2 1 -1.5\n";
    let got = parse_matrix_market(coo, "c.mtx".as_ref()).unwrap();
    assert_eq!(got, DMatrix::from_row_slice(2, 2, &[4.0, -1.5, -1.5, 0.0]));
}

#[test]
fn corrupt_and_invalid_files_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let (g, mask) = gen_random_ncm(4, 1, 0.0).unwrap();
    let path = write_ncm_instance(dir.path(), "bad", &g, &mask).unwrap();

    let g_file = dir.path().join("bad_g.mtx");
    let text = fs::read_to_string(&g_file).unwrap().replacen("4 4", "4 5", 1);
    fs::write(&g_file, text).unwrap();
    let err = load_instance(&path).unwrap_err();
    assert!(matches!(err, InstanceError::Parse { .. }), "{err}");
    assert!(err.to_string().contains("bad_g.mtx"), "{err}");

    let mut asym = g.as_matrix().clone();
    asym[(0, 1)] += 0.25;
    write_matrix_market(&g_file, &asym).unwrap();
    let err = load_instance(&path).unwrap_err();
    assert!(matches!(err, InstanceError::InvariantViolation(ref m) if m.contains("symmetry")), "{err}");

    let odd = dir.path().join("odd.manifest");
    fs::write(&odd, "kind = banana\n").unwrap();
    let err = load_instance(&odd).unwrap_err();
    assert!(matches!(err, InstanceError::Parse { line: Some(1), .. }), "{err}");

    fs::write(&odd, "kind = ncm\nn = 4\nn = 5\n").unwrap();
    assert!(matches!(load_instance(&odd), Err(InstanceError::Parse { line: Some(3), .. })));

    let missing = dir.path().join("none.manifest");
    assert!(matches!(load_instance(&missing), Err(InstanceError::Io { .. })));
}

#[test]
fn generated_and_cccp_manifests_load() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen.manifest");
    fs::write(&gen, "# generated\nkind = ncm\nn = 6\nseed = 2\nmissing_fraction = 0.25\n").unwrap();
    let Instance::Qsdp(q) = load_instance(&gen).unwrap().1 else { panic!("ncm") };
    let (g, mask) = gen_random_ncm(6, 2, 0.25).unwrap();
    assert_eq!(q.c(), build_ncm(&g, &mask).unwrap().c());

    write_matrix_market(&dir.path().join("bmat.mtx"), &DMatrix::from_row_slice(1, 2, &[1.0, 1.0])).unwrap();
    write_matrix_market(&dir.path().join("b.mtx"), &DMatrix::from_element(1, 1, 1.0)).unwrap();
    write_matrix_market(&dir.path().join("c.mtx"), &DMatrix::from_row_slice(2, 1, &[1.0, 2.0])).unwrap();
    let lp = dir.path().join("lp.manifest");
    fs::write(
        &lp,
        "kind = cccp-file\nblocks = vec:2\nprox = nonneg\ncone = zero:1\nbmat = bmat.mtx\nb = b.mtx\nc = c.mtx\n",
    )
    .unwrap();
    let Instance::Cccp(p) = load_instance(&lp).unwrap().1 else { panic!("cccp") };
    assert_eq!((p.primal_dim(), p.dual_dim()), (2, 1));
}
