use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use conic_alm::instances::write_ncm_instance;
use conic_alm::matcone::SymMatrix;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conic-alm")).args(args).env("CONIC_ALM_LOG", "quiet").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines().find_map(|l| l.strip_prefix(key)).map(str::trim).unwrap_or_else(|| panic!("no '{key}' in:\n{out}"))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn example1_fixed_sigma_writes_history() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.csv");
    let o = run(&["example1", "--sigma", "fixed:10", "--tol", "1e-10", "--history", path_str(&h)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "termination:"), "converged");
    let csv = fs::read_to_string(&h).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "k,sigma,kkt_res,primal_infeas,complementarity,objective,e_norm,thrA,thrB,inner_iters,dist_y_star"
    );
    assert!(csv.lines().count() > 2);
    let last_res: f64 = csv.lines().last().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(last_res <= 1e-10);
}

#[test]
fn history_files_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        assert_eq!(run(&["example1", "--sigma", "geometric:1,2", "--history", path_str(p)]).status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn invalid_sigma_names_the_flag() {
    let o = run(&["example1", "--sigma", "fixed:-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--sigma"), "{}", stderr(&o));
}

#[test]
fn geometric_sigma_reports_superlinear() {
    let o = run(&["example1", "--sigma", "geometric:1,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "superlinear:"), "true");
}

#[test]
fn random_ncm_converges_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let (h, rep) = (dir.path().join("h.json"), dir.path().join("report.json"));
    let o = run(&["ncm", "--random", "20,3,0.3", "--history", path_str(&h), "--report", path_str(&rep)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(field(&out, "max |X_ii - 1|:").parse::<f64>().unwrap() <= 1e-8);
    assert!(field(&out, "lambda_min(X):").parse::<f64>().unwrap() >= -1e-9);
    let hist: serde_json::Value = serde_json::from_str(&fs::read_to_string(&h).unwrap()).unwrap();
    assert!(hist.as_array().is_some_and(|a| !a.is_empty()));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(report["termination"], "converged");
}

#[test]
fn valid_correlation_instance_is_a_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let g = SymMatrix::from_row_slice(3, &[1.0, 0.5, 0.2, 0.5, 1.0, 0.3, 0.2, 0.3, 1.0]).unwrap();
    let mask = SymMatrix::from_row_slice(3, &[1.0; 9]).unwrap();
    let mf = write_ncm_instance(dir.path(), "valid", &g, &mask).unwrap();
    let o = run(&["ncm", "--instance", path_str(&mf), "--tol", "1e-10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(field(&out, "termination:"), "converged");
    let lmin_g = conic_alm::matcone::sym_eigen(&g).unwrap().values[0];
    let lmin_x: f64 = field(&out, "lambda_min(X):").parse().unwrap();
    assert!((lmin_x - lmin_g).abs() <= 1e-8, "{out}");
}

#[test]
fn solve_dispatches_on_manifest_kind() {
    let dir = tempfile::tempdir().unwrap();
    let ex2 = dir.path().join("ex2.manifest");
    fs::write(&ex2, "kind = example2\n").unwrap();
    let o = run(&["solve", path_str(&ex2)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(field(&stdout(&o), "dual distance to solution set:").parse::<f64>().unwrap() <= 1e-6);

    let bad = dir.path().join("bad.manifest");
    fs::write(&bad, "kind = nonsense\n").unwrap();
    let o = run(&["solve", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.manifest"), "{}", stderr(&o));

    let missing = run(&["solve", path_str(&dir.path().join("none.manifest"))]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn manifest_settings_apply_and_flags_override_them() {
    let dir = tempfile::tempdir().unwrap();
    let mf = dir.path().join("ex1.manifest");
    fs::write(&mf, "kind = example1\nsigma = fixed:100\ntol = 1e-9\n").unwrap();
    let from_manifest = stdout(&run(&["solve", path_str(&mf)]));
    let overridden = stdout(&run(&["solve", path_str(&mf), "--sigma", "fixed:1"]));
    let outer = |s: &str| field(s, "outer iterations:").parse::<usize>().unwrap();
    assert!(outer(&from_manifest) < outer(&overridden), "{from_manifest}\n{overridden}");
}

#[test]
fn exhausted_budget_exits_with_code_2() {
    let o = run(&["example1", "--sigma", "fixed:1", "--max-outer", "2"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    // For quadratic SDPs the inner budget counts Newton steps.
    let o = run(&["ncm", "--random", "30,2,0.3", "--inner-budget", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}
