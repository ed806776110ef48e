use super::cone::{project_block_slice, project_polar_block_slice, ConeBlock, Value};
use super::eigen::eigen_of_slice;
use super::layout::BlockShape;
use super::{MatconeError, Result};

/// Points farther than this from a cone count as outside it.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Nonsmooth term `p` of one primal block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProxSpec {
    /// `p = 0`, so `p* = delta_{0}`.
    ZeroFunction,
    /// `p = delta_{S^n_+}`, so `p* = delta_{S^n_-}`.
    IndicatorPsd(usize),
    /// `p = delta_K`, so `p* = delta_{K°}`.
    IndicatorCone(ConeBlock),
}

/// Value in `(-inf, +inf]`; the infinite case keeps how far outside the domain the point was.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf { violation: f64 },
}

impl ExtReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// The finite value, or `DomainViolation` naming `what`.
    pub fn finite(self, what: &str) -> Result<f64> {
        match self {
            ExtReal::Finite(v) => Ok(v),
            ExtReal::PosInf { violation } => {
                Err(MatconeError::DomainViolation(format!("{what} is +inf (violation {violation:e})")))
            }
        }
    }
}

impl ProxSpec {
    fn cone(&self) -> Option<ConeBlock> {
        match *self {
            ProxSpec::ZeroFunction => None,
            ProxSpec::IndicatorPsd(n) => Some(ConeBlock::Psd(n)),
            ProxSpec::IndicatorCone(k) => Some(k),
        }
    }

    /// Shape required of the argument, if the spec fixes one.
    pub fn shape(&self) -> Option<BlockShape> {
        self.cone().map(|k| k.shape())
    }
}

fn check(spec: &ProxSpec, shape: BlockShape) -> Result<()> {
    match spec.shape() {
        Some(s) if s != shape => Err(MatconeError::DimensionMismatch { expected: s.len(), found: shape.len() }),
        _ => Ok(()),
    }
}

fn shape_of(v: &Value) -> BlockShape {
    match v {
        Value::Vector(x) => BlockShape::Vector(x.len()),
        Value::Matrix(m) => BlockShape::Sym(m.order()),
    }
}

pub fn prox_p(spec: &ProxSpec, v: &Value) -> Result<Value> {
    let shape = shape_of(v);
    let mut out = vec![0.0; shape.len()];
    prox_slice(spec, shape, v.as_slice(), &mut out)?;
    Ok(Value::like(shape, out))
}

/// `Prox_{p*}(v) = v - Prox_p(v)`.
pub fn prox_p_star(spec: &ProxSpec, v: &Value) -> Result<Value> {
    let shape = shape_of(v);
    let mut out = vec![0.0; shape.len()];
    match spec.cone() {
        None => {}
        Some(k) => {
            check(spec, shape)?;
            project_polar_block_slice(&k, v.as_slice(), &mut out)?;
        }
    }
    Ok(Value::like(shape, out))
}

pub fn p_value(spec: &ProxSpec, v: &Value) -> Result<ExtReal> {
    p_value_slice(spec, shape_of(v), v.as_slice())
}

pub fn p_star_value(spec: &ProxSpec, s: &Value) -> Result<ExtReal> {
    p_star_value_slice(spec, shape_of(s), s.as_slice())
}

pub(crate) fn prox_slice(spec: &ProxSpec, shape: BlockShape, v: &[f64], out: &mut [f64]) -> Result<()> {
    check(spec, shape)?;
    match spec.cone() {
        None => out.copy_from_slice(v),
        Some(k) => project_block_slice(&k, v, out)?,
    }
    Ok(())
}

/// Distance-like violation of membership in `k`: largest eigenvalue/entry breach.
fn violation(k: &ConeBlock, v: &[f64]) -> Result<f64> {
    Ok(match k {
        ConeBlock::Zero(_) => v.iter().fold(0.0_f64, |a, x| a.max(x.abs())),
        ConeBlock::Nonneg(_) => v.iter().fold(0.0_f64, |a, x| a.max(-x)),
        ConeBlock::Nonpos(_) => v.iter().fold(0.0_f64, |a, x| a.max(*x)),
        ConeBlock::Psd(n) => (-eigen_of_slice(*n, v)?.values[0]).max(0.0),
    })
}

fn polar(k: &ConeBlock) -> Option<ConeBlock> {
    match *k {
        ConeBlock::Zero(_) => None,
        ConeBlock::Nonneg(d) => Some(ConeBlock::Nonpos(d)),
        ConeBlock::Nonpos(d) => Some(ConeBlock::Nonneg(d)),
        ConeBlock::Psd(_) => None,
    }
}

fn indicator(viol: f64) -> ExtReal {
    if viol <= FEASIBILITY_TOL {
        ExtReal::Finite(0.0)
    } else {
        ExtReal::PosInf { violation: viol }
    }
}

pub(crate) fn p_value_slice(spec: &ProxSpec, shape: BlockShape, v: &[f64]) -> Result<ExtReal> {
    check(spec, shape)?;
    match spec.cone() {
        None => Ok(ExtReal::Finite(0.0)),
        Some(k) => Ok(indicator(violation(&k, v)?)),
    }
}

pub(crate) fn p_star_value_slice(spec: &ProxSpec, shape: BlockShape, s: &[f64]) -> Result<ExtReal> {
    check(spec, shape)?;
    let viol = match spec.cone() {
        None => s.iter().fold(0.0_f64, |a, x| a.max(x.abs())),
        Some(ConeBlock::Zero(_)) => 0.0,
        Some(ConeBlock::Psd(n)) => eigen_of_slice(n, s)?.values[n - 1].max(0.0),
        Some(k) => violation(&polar(&k).expect("ray cones have ray polars"), s)?,
    };
    Ok(indicator(viol))
}
