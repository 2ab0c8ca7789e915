use std::fmt;

use thiserror::Error;

/// Width × height of a 2D grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    pub width: usize,
    pub height: usize,
}

impl Shape {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid dimensions must be at least 1x1, got {0}")]
    EmptyShape(Shape),

    #[error("buffer length {len} does not match {shape} grid")]
    BufferLength { shape: Shape, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: Shape, found: Shape },

    #[error("binary mask value {value} at index {index} is not 0 or 1")]
    InvalidMaskValue { index: usize, value: u8 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("mask has no {missing} pixels")]
    DegenerateMask { missing: &'static str },

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("point set contains duplicate point ({0}, {1})")]
    DuplicatePoint(usize, usize),

    #[error("invalid sigmoid parameters: alpha = {alpha}, beta = {beta} (alpha must be > 0, both finite)")]
    InvalidParams { alpha: f64, beta: f64 },

    #[error("loss weight {name} = {value} must be finite and >= 0")]
    InvalidWeight { name: &'static str, value: f64 },

    #[error("labels {first} and {second} touch at ({row}, {col})")]
    SeparationViolation {
        first: u32,
        second: u32,
        row: usize,
        col: usize,
    },

    #[error("ground truth has no labeled objects")]
    NoGroundTruthObjects,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_same(expected: Shape, found: Shape) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
