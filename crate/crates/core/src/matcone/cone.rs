use nalgebra::{DMatrix, DVector};

use super::eigen::project_psd_slice;
use super::layout::{BlockShape, Layout};
use super::{MatconeError, Result, SymMatrix};

/// One closed convex cone of a product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeBlock {
    Zero(usize),
    Nonneg(usize),
    Nonpos(usize),
    Psd(usize),
}

impl ConeBlock {
    pub fn shape(&self) -> BlockShape {
        match *self {
            ConeBlock::Zero(d) | ConeBlock::Nonneg(d) | ConeBlock::Nonpos(d) => BlockShape::Vector(d),
            ConeBlock::Psd(n) => BlockShape::Sym(n),
        }
    }

    /// Length in the flat layout (`n*n` for `Psd(n)`).
    pub fn dim(&self) -> usize {
        self.shape().len()
    }

    fn order(&self) -> usize {
        match *self {
            ConeBlock::Zero(d) | ConeBlock::Nonneg(d) | ConeBlock::Nonpos(d) | ConeBlock::Psd(d) => d,
        }
    }
}

/// Vector or symmetric-matrix argument of a block operation.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Vector(DVector<f64>),
    Matrix(SymMatrix),
}

impl Value {
    pub fn as_slice(&self) -> &[f64] {
        match self {
            Value::Vector(v) => v.as_slice(),
            Value::Matrix(m) => m.as_slice(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Value::Vector(v) => v.norm(),
            Value::Matrix(m) => m.frobenius_norm(),
        }
    }

    pub(crate) fn like(shape: BlockShape, data: Vec<f64>) -> Value {
        match shape {
            BlockShape::Vector(_) => Value::Vector(DVector::from_vec(data)),
            BlockShape::Sym(n) => Value::Matrix(SymMatrix::symmetrized(DMatrix::from_vec(n, n, data))),
        }
    }

    pub(crate) fn check_shape(&self, shape: BlockShape) -> Result<()> {
        let ok = match (self, shape) {
            (Value::Vector(v), BlockShape::Vector(d)) => v.len() == d,
            (Value::Matrix(m), BlockShape::Sym(n)) => m.order() == n,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(MatconeError::DimensionMismatch { expected: shape.len(), found: self.as_slice().len() })
        }
    }
}

/// `Pi_K(v)`.
pub fn project_cone(k: &ConeBlock, v: &Value) -> Result<Value> {
    v.check_shape(k.shape())?;
    let mut out = vec![0.0; k.dim()];
    project_block_slice(k, v.as_slice(), &mut out)?;
    Ok(Value::like(k.shape(), out))
}

/// `Pi_{K°}(v) = v - Pi_K(v)`.
pub fn project_polar(k: &ConeBlock, v: &Value) -> Result<Value> {
    v.check_shape(k.shape())?;
    let mut out = vec![0.0; k.dim()];
    project_polar_block_slice(k, v.as_slice(), &mut out)?;
    Ok(Value::like(k.shape(), out))
}

pub(crate) fn project_block_slice(k: &ConeBlock, v: &[f64], out: &mut [f64]) -> Result<()> {
    if v.len() != k.dim() || out.len() != k.dim() {
        return Err(MatconeError::DimensionMismatch { expected: k.dim(), found: v.len() });
    }
    match k {
        ConeBlock::Zero(_) => out.iter_mut().for_each(|o| *o = 0.0),
        ConeBlock::Nonneg(_) => out.iter_mut().zip(v).for_each(|(o, x)| *o = x.max(0.0)),
        ConeBlock::Nonpos(_) => out.iter_mut().zip(v).for_each(|(o, x)| *o = x.min(0.0)),
        ConeBlock::Psd(n) => project_psd_slice(*n, v, out)?,
    }
    Ok(())
}

pub(crate) fn project_polar_block_slice(k: &ConeBlock, v: &[f64], out: &mut [f64]) -> Result<()> {
    match k {
        ConeBlock::Zero(_) => {
            if v.len() != k.dim() || out.len() != k.dim() {
                return Err(MatconeError::DimensionMismatch { expected: k.dim(), found: v.len() });
            }
            out.copy_from_slice(v);
        }
        ConeBlock::Nonneg(_) => return project_block_slice(&ConeBlock::Nonpos(k.order()), v, out),
        ConeBlock::Nonpos(_) => return project_block_slice(&ConeBlock::Nonneg(k.order()), v, out),
        ConeBlock::Psd(n) => {
            project_block_slice(k, v, out)?;
            for (o, x) in out.iter_mut().zip(v) {
                *o = x - *o;
            }
            super::sym::symmetrize_in_place(*n, out);
        }
    }
    Ok(())
}

/// Ordered product of cone blocks over one flat vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeProduct {
    blocks: Vec<ConeBlock>,
    layout: Layout,
}

impl ConeProduct {
    pub fn new(blocks: Vec<ConeBlock>) -> Result<Self> {
        if blocks.iter().any(|b| b.dim() == 0) {
            return Err(MatconeError::EmptyBlock);
        }
        let layout = Layout::new(blocks.iter().map(ConeBlock::shape).collect());
        Ok(ConeProduct { blocks, layout })
    }

    pub fn blocks(&self) -> &[ConeBlock] {
        &self.blocks
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn apply(&self, v: &DVector<f64>, f: fn(&ConeBlock, &[f64], &mut [f64]) -> Result<()>) -> Result<DVector<f64>> {
        if v.len() != self.dim() {
            return Err(MatconeError::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        let mut out = DVector::zeros(self.dim());
        for (i, b) in self.blocks.iter().enumerate() {
            let r = self.layout.range(i);
            f(b, &v.as_slice()[r.clone()], &mut out.as_mut_slice()[r])?;
        }
        Ok(out)
    }

    pub fn project(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.apply(v, project_block_slice)
    }

    pub fn project_polar(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.apply(v, project_polar_block_slice)
    }
}
