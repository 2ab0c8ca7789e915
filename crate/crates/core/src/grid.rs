//! Dense row-major 2D grids: binary masks, real-valued fields and label maps.

use crate::error::{Error, Result, Shape};

fn check_shape(width: usize, height: usize, len: usize) -> Result<Shape> {
    let shape = Shape::new(width, height);
    if width == 0 || height == 0 {
        return Err(Error::EmptyShape(shape));
    }
    if shape.len() != len {
        return Err(Error::BufferLength { shape, len });
    }
    Ok(shape)
}

macro_rules! grid_common {
    ($name:ident, $elem:ty) => {
        impl $name {
            pub fn shape(&self) -> Shape {
                self.shape
            }

            pub fn width(&self) -> usize {
                self.shape.width
            }

            pub fn height(&self) -> usize {
                self.shape.height
            }

            pub fn len(&self) -> usize {
                self.data.len()
            }

            pub fn is_empty(&self) -> bool {
                self.data.is_empty()
            }

            pub fn data(&self) -> &[$elem] {
                &self.data
            }

            pub fn into_data(self) -> Vec<$elem> {
                self.data
            }

            #[inline]
            pub fn get(&self, row: usize, col: usize) -> $elem {
                self.data[row * self.shape.width + col]
            }

            /// Iterates `(row, col, value)` in row-major order.
            pub fn iter_indexed(&self) -> impl Iterator<Item = (usize, usize, $elem)> + '_ {
                let w = self.shape.width;
                self.data
                    .iter()
                    .enumerate()
                    .map(move |(i, &v)| (i / w, i % w, v))
            }
        }
    };
}

/// A segmentation mask holding only 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    shape: Shape,
    data: Vec<u8>,
}

grid_common!(BinaryMask, u8);

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        let shape = check_shape(width, height, data.len())?;
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(Error::InvalidMaskValue { index, value });
        }
        Ok(Self { shape, data })
    }

    /// Panics if either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        assert!(width > 0 && height > 0, "empty mask");
        let data = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c) as u8)
            .collect();
        Self {
            shape: Shape::new(width, height),
            data,
        }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::from_fn(width, height, |_, _| false)
    }

    #[inline]
    pub fn is_set(&self, row: usize, col: usize) -> bool {
        self.get(row, col) == 1
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    pub fn inverted(&self) -> Self {
        Self {
            shape: self.shape,
            data: self.data.iter().map(|&v| 1 - v).collect(),
        }
    }
}

/// A real-valued field (SDFs, probability maps, gradients). Values are always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    shape: Shape,
    data: Vec<f64>,
}

grid_common!(ScalarField, f64);

impl ScalarField {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        let shape = check_shape(width, height, data.len())?;
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { shape, data })
    }

    /// Panics if either dimension is zero.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "empty field");
        assert!(value.is_finite());
        Self {
            shape: Shape::new(width, height),
            data: vec![value; width * height],
        }
    }

    /// Panics if either dimension is zero or `f` returns a non-finite value.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "empty field");
        let data: Vec<f64> = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        assert!(data.iter().all(|v| v.is_finite()), "non-finite field value");
        Self {
            shape: Shape::new(width, height),
            data,
        }
    }

    /// Builds a field from data the caller has already checked.
    pub(crate) fn from_parts(shape: Shape, data: Vec<f64>) -> Self {
        debug_assert_eq!(shape.len(), data.len());
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { shape, data }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(self.shape, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl std::ops::Neg for &ScalarField {
    type Output = ScalarField;

    fn neg(self) -> ScalarField {
        self.map(|v| -v)
    }
}

/// An instance label map: 0 is background, every other id is one object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    shape: Shape,
    data: Vec<u32>,
}

grid_common!(LabelMap, u32);

impl LabelMap {
    pub fn new(width: usize, height: usize, data: Vec<u32>) -> Result<Self> {
        let shape = check_shape(width, height, data.len())?;
        Ok(Self { shape, data })
    }

    /// Panics if either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        assert!(width > 0 && height > 0, "empty label map");
        let data = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        Self {
            shape: Shape::new(width, height),
            data,
        }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::from_fn(width, height, |_, _| 0)
    }

    pub(crate) fn from_parts(shape: Shape, data: Vec<u32>) -> Self {
        debug_assert_eq!(shape.len(), data.len());
        Self { shape, data }
    }

    /// Sorted distinct nonzero ids.
    pub fn label_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.data.iter().copied().filter(|&v| v != 0).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn foreground(&self) -> BinaryMask {
        BinaryMask {
            shape: self.shape,
            data: self.data.iter().map(|&v| (v != 0) as u8).collect(),
        }
    }
}
