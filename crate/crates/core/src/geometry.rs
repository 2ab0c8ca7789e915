//! Exact Euclidean distance transforms and signed distance functions.
//!
//! The transform is the separable lower-envelope method: a vertical sweep gives
//! the distance to the nearest zero pixel in each column, then every row takes
//! the lower envelope of the parabolas `(c - v)^2 + g(v)^2`. All arithmetic is
//! done on integers, so squared distances are exact.

use rayon::prelude::*;

use crate::error::{Error, Result, Shape};
use crate::grid::{BinaryMask, ScalarField};

const NO_SITE: u32 = u32::MAX;

/// Squared Euclidean distance from every pixel to the nearest 0-valued pixel.
///
/// Fails with [`Error::DegenerateMask`] when the mask has no 0 pixel.
pub fn squared_distance_transform(mask: &BinaryMask) -> Result<Vec<u64>> {
    if mask.count_ones() == mask.len() {
        return Err(Error::DegenerateMask {
            missing: "background",
        });
    }
    Ok(squared_edt_unchecked(mask.shape(), mask.data()))
}

/// Exact distance from every pixel to the nearest 0-valued pixel, in pixel units.
pub fn euclidean_distance_transform(mask: &BinaryMask) -> Result<ScalarField> {
    let sq = squared_distance_transform(mask)?;
    let shape = mask.shape();
    Ok(ScalarField::from_parts(
        shape,
        sq.into_iter().map(|d| (d as f64).sqrt()).collect(),
    ))
}

/// `data` must contain at least one zero.
pub(crate) fn squared_edt_unchecked(shape: Shape, data: &[u8]) -> Vec<u64> {
    let Shape { width, height } = shape;

    // Vertical pass: distance to the nearest zero in the same column.
    let mut column = vec![NO_SITE; width * height];
    for r in 0..height {
        for c in 0..width {
            let i = r * width + c;
            column[i] = if data[i] == 0 {
                0
            } else if r > 0 && column[i - width] != NO_SITE {
                column[i - width] + 1
            } else {
                NO_SITE
            };
        }
    }
    for r in (0..height.saturating_sub(1)).rev() {
        for c in 0..width {
            let i = r * width + c;
            let below = column[i + width];
            if below != NO_SITE && below + 1 < column[i] {
                column[i] = below + 1;
            }
        }
    }

    // Horizontal pass, one independent lower envelope per row.
    let mut out = vec![0u64; width * height];
    out.par_chunks_mut(width)
        .zip(column.par_chunks(width))
        .for_each_init(
            || Envelope::with_capacity(width),
            |env, (out_row, col_row)| env.transform_row(col_row, out_row),
        );
    out
}

/// Intersection abscissa of two parabolas as an exact fraction `num / den`, `den > 0`.
#[derive(Clone, Copy)]
enum Boundary {
    NegInf,
    At { num: i128, den: i128 },
}

impl Boundary {
    fn between(v: usize, fv: u64, q: usize, fq: u64) -> Self {
        let (v, q) = (v as i128, q as i128);
        Boundary::At {
            num: (fq as i128 + q * q) - (fv as i128 + v * v),
            den: 2 * (q - v),
        }
    }

    fn le(self, other: Self) -> bool {
        match (self, other) {
            (Boundary::NegInf, _) => true,
            (_, Boundary::NegInf) => false,
            (Boundary::At { num: a, den: b }, Boundary::At { num: c, den: d }) => a * d <= c * b,
        }
    }

    fn lt_point(self, q: usize) -> bool {
        match self {
            Boundary::NegInf => true,
            Boundary::At { num, den } => num < q as i128 * den,
        }
    }
}

struct Envelope {
    sites: Vec<usize>,
    bounds: Vec<Boundary>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self {
            sites: Vec::with_capacity(n),
            bounds: Vec::with_capacity(n),
        }
    }

    fn transform_row(&mut self, col: &[u32], out: &mut [u64]) {
        let height_sq = |i: usize| {
            let g = col[i] as u64;
            g * g
        };
        self.sites.clear();
        self.bounds.clear();

        for q in (0..col.len()).filter(|&q| col[q] != NO_SITE) {
            let fq = height_sq(q);
            loop {
                let Some(&v) = self.sites.last() else {
                    self.sites.push(q);
                    self.bounds.push(Boundary::NegInf);
                    break;
                };
                let s = Boundary::between(v, height_sq(v), q, fq);
                if s.le(*self.bounds.last().unwrap()) {
                    self.sites.pop();
                    self.bounds.pop();
                } else {
                    self.sites.push(q);
                    self.bounds.push(s);
                    break;
                }
            }
        }
        debug_assert!(!self.sites.is_empty(), "row without any finite site");

        let mut k = 0;
        for (q, slot) in out.iter_mut().enumerate() {
            while k + 1 < self.sites.len() && self.bounds[k + 1].lt_point(q) {
                k += 1;
            }
            let v = self.sites[k];
            let dx = q.abs_diff(v) as u64;
            *slot = dx * dx + height_sq(v);
        }
    }
}

/// A signed distance field together with a flag for single-class input masks.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedDistance {
    pub field: ScalarField,
    /// Set when the mask was all-foreground or all-background; the field is then
    /// the constant `±sqrt(width² + height²)`.
    pub degenerate: bool,
}

/// Signed distance function of a mask, positive inside.
///
/// Each pixel gets `±(d - 0.5)` where `d` is the exact distance to the nearest
/// pixel centre of the opposite class, so the zero level set lies halfway
/// between neighbouring pixel centres.
pub fn signed_distance(mask: &BinaryMask) -> SignedDistance {
    let shape = mask.shape();
    let ones = mask.count_ones();
    if ones == 0 || ones == mask.len() {
        let d_max = ((shape.width * shape.width + shape.height * shape.height) as f64).sqrt();
        let value = if ones == 0 { -d_max } else { d_max };
        return SignedDistance {
            field: ScalarField::from_parts(shape, vec![value; shape.len()]),
            degenerate: true,
        };
    }

    let inside = squared_edt_unchecked(shape, mask.data());
    let outside = squared_edt_unchecked(shape, mask.inverted().data());
    let data = mask
        .data()
        .iter()
        .zip(inside.iter().zip(&outside))
        .map(|(&m, (&din, &dout))| {
            if m == 1 {
                (din as f64).sqrt() - 0.5
            } else {
                -((dout as f64).sqrt() - 0.5)
            }
        })
        .collect();
    SignedDistance {
        field: ScalarField::from_parts(shape, data),
        degenerate: false,
    }
}
