use log::trace;
use nalgebra::{DMatrix, DVector};

use super::psi::{psi_eval_unchecked, NewtonCache, PsiEval};
use super::{QsdpData, QsdpError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonConfig {
    pub max_iters: usize,
    pub cg_max_iters: usize,
    /// CG stops at relative residual `min(cg_rel_cap, ||g||^(0.5 + tau))`.
    pub tau: f64,
    pub cg_rel_cap: f64,
    /// Regularization `eps_j = min(reg_cap, reg_factor * ||g_j||)`.
    pub reg_cap: f64,
    pub reg_factor: f64,
    pub ls_ratio: f64,
    pub ls_c1: f64,
    pub ls_max_halvings: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            max_iters: 50,
            cg_max_iters: 500,
            tau: 0.5,
            cg_rel_cap: 0.1,
            reg_cap: 1e-4,
            reg_factor: 0.1,
            ls_ratio: 0.5,
            ls_c1: 1e-4,
            ls_max_halvings: 50,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iters > 0
            && self.cg_max_iters > 0
            && self.tau > 0.0
            && self.cg_rel_cap > 0.0
            && self.reg_cap > 0.0
            && self.reg_factor > 0.0
            && self.ls_ratio > 0.0
            && self.ls_ratio < 1.0
            && self.ls_c1 > 0.0
            && self.ls_c1 < 1.0
            && self.ls_max_halvings > 0;
        if ok {
            Ok(())
        } else {
            Err(QsdpError::InvalidData(format!("invalid Newton configuration {self:?}")))
        }
    }
}

/// Current Newton iterate, offered to the stopping predicate.
pub struct NewtonProbe<'a> {
    pub x1: &'a DMatrix<f64>,
    pub x2: &'a DVector<f64>,
    pub eval: &'a PsiEval,
}

/// Result of a Newton-CG run; `converged == false` marks the best iterate
/// of a failed run.
#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub x1: DMatrix<f64>,
    pub x2: DVector<f64>,
    pub x3: DMatrix<f64>,
    pub eval: PsiEval,
    /// `||grad psi||` at every iterate, the accepted one last.
    pub grad_norms: Vec<f64>,
    /// `psi` at every iterate.
    pub psi_values: Vec<f64>,
    pub cg_iters: Vec<usize>,
    /// Whether each CG solve met its relative tolerance.
    pub cg_met_tol: Vec<bool>,
    pub iterations: usize,
    pub converged: bool,
}

/// Pair `(d1, d2)` in `S^n x R^m`.
#[derive(Clone)]
struct Pair(DMatrix<f64>, DVector<f64>);

impl Pair {
    fn dot(&self, o: &Pair) -> f64 {
        self.0.dot(&o.0) + self.1.dot(&o.1)
    }
    fn axpy(&mut self, a: f64, o: &Pair) {
        self.0 += &o.0 * a;
        self.1 += &o.1 * a;
    }
}

/// CG on `(V + reg I) d = rhs` restricted to `Ran(H) x R^m`.
fn cg(q: &QsdpData, cache: &NewtonCache, rhs: &Pair, reg: f64, rel_tol: f64, max_iters: usize) -> (Pair, usize, bool) {
    let apply = |d: &Pair| {
        let (v1, v2) = cache.apply(q, &d.0, &d.1);
        Pair(q.project_range_h(&(v1 + &d.0 * reg)), v2 + &d.1 * reg)
    };
    let target = rel_tol * rhs.dot(rhs).sqrt();
    let mut d = Pair(DMatrix::zeros(q.n(), q.n()), DVector::zeros(q.m()));
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    for it in 0..max_iters {
        if rr.sqrt() <= target {
            return (d, it, true);
        }
        let vp = apply(&p);
        let pvp = p.dot(&vp);
        if pvp <= 0.0 {
            return (d, it, false);
        }
        let alpha = rr / pvp;
        d.axpy(alpha, &p);
        r.axpy(-alpha, &vp);
        let rr_new = r.dot(&r);
        let beta = rr_new / rr;
        rr = rr_new;
        let mut pn = r.clone();
        pn.axpy(beta, &p);
        p = pn;
    }
    let met = rr.sqrt() <= target;
    (d, max_iters, met)
}

/// Semismooth Newton-CG on `grad psi_k = 0`, warm-started at `(x1, x2)`.
///
/// Returns the first iterate accepted by `stop`. `x1` and all directions are
/// kept in `Ran(H)`.
pub fn newton_cg_solve(
    q: &QsdpData,
    x_k: &DMatrix<f64>,
    sigma: f64,
    x1: DMatrix<f64>,
    x2: DVector<f64>,
    stop: &mut dyn FnMut(&NewtonProbe) -> bool,
    cfg: &NewtonConfig,
) -> Result<NewtonOutcome> {
    cfg.validate()?;
    let mut x1 = q.project_range_h(&x1);
    let mut x2 = x2;
    let mut ev = psi_eval_unchecked(q, &x1, &x2, x_k, sigma)?;
    let mut out_norms = vec![ev.grad_norm()];
    let mut out_psi = vec![ev.value];
    let mut cg_iters = Vec::new();
    let mut cg_met = Vec::new();
    let finish = |x1: DMatrix<f64>,
                  x2: DVector<f64>,
                  ev: PsiEval,
                  grad_norms: Vec<f64>,
                  psi_values: Vec<f64>,
                  cg_iters: Vec<usize>,
                  cg_met_tol: Vec<bool>,
                  iterations: usize,
                  converged: bool| NewtonOutcome {
        x3: ev.x3(sigma),
        x1,
        x2,
        eval: ev,
        grad_norms,
        psi_values,
        cg_iters,
        cg_met_tol,
        iterations,
        converged,
    };
    for j in 0..=cfg.max_iters {
        if stop(&NewtonProbe { x1: &x1, x2: &x2, eval: &ev }) {
            return Ok(finish(x1, x2, ev, out_norms, out_psi, cg_iters, cg_met, j, true));
        }
        if j == cfg.max_iters {
            break;
        }
        let gn = ev.grad_norm();
        let cache = NewtonCache::from_eval(&ev, sigma);
        let rhs = Pair(-&ev.grad1, -&ev.grad2);
        let reg = cfg.reg_cap.min(cfg.reg_factor * gn);
        let rel = cfg.cg_rel_cap.min(gn.powf(0.5 + cfg.tau));
        let (d, its, met) = cg(q, &cache, &rhs, reg, rel, cfg.cg_max_iters);
        cg_iters.push(its);
        cg_met.push(met);
        let slope = -rhs.dot(&d);
        let slack = 16.0 * f64::EPSILON * ev.scale;
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.ls_max_halvings {
            let t1 = &x1 + &d.0 * alpha;
            let t2 = &x2 + &d.1 * alpha;
            let te = psi_eval_unchecked(q, &t1, &t2, x_k, sigma)?;
            if te.value <= ev.value + cfg.ls_c1 * alpha * slope + slack {
                accepted = Some((t1, t2, te));
                break;
            }
            alpha *= cfg.ls_ratio;
        }
        let Some((t1, t2, te)) = accepted else {
            let best = finish(x1, x2, ev, out_norms, out_psi, cg_iters, cg_met, j, false);
            return Err(QsdpError::LineSearchStall { best: Box::new(best) });
        };
        trace!("newton {j}: ||g||={gn:e} cg={its} alpha={alpha} psi={:e}", te.value);
        x1 = t1;
        x2 = t2;
        ev = te;
        out_norms.push(ev.grad_norm());
        out_psi.push(ev.value);
    }
    let best = finish(x1, x2, ev, out_norms, out_psi, cg_iters, cg_met, cfg.max_iters, false);
    Err(QsdpError::BudgetExceeded { best: Box::new(best) })
}
