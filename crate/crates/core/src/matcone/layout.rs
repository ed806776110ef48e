use std::ops::Range;

use nalgebra::DVector;

/// Shape of one block of a flat vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockShape {
    Vector(usize),
    /// Symmetric `n x n` block stored column-major in `n*n` slots.
    Sym(usize),
}

impl BlockShape {
    pub fn len(&self) -> usize {
        match *self {
            BlockShape::Vector(d) => d,
            BlockShape::Sym(n) => n * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ordered product of blocks mapped onto one flat vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    shapes: Vec<BlockShape>,
    offsets: Vec<usize>,
}

impl Layout {
    pub fn new(shapes: Vec<BlockShape>) -> Self {
        let mut offsets = Vec::with_capacity(shapes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for s in &shapes {
            acc += s.len();
            offsets.push(acc);
        }
        Layout { shapes, offsets }
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn shapes(&self) -> &[BlockShape] {
        &self.shapes
    }

    pub fn num_blocks(&self) -> usize {
        self.shapes.len()
    }

    pub fn range(&self, block: usize) -> Range<usize> {
        self.offsets[block]..self.offsets[block + 1]
    }

    pub fn zeros(&self) -> DVector<f64> {
        DVector::zeros(self.dim())
    }

    pub fn block<'a>(&self, v: &'a DVector<f64>, block: usize) -> &'a [f64] {
        &v.as_slice()[self.range(block)]
    }
}
