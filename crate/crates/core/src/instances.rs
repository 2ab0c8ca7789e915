//! Instance label pre- and post-processing.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::grid::{BinaryMask, LabelMap, ScalarField};
use crate::mappings::{sigmoid, SigmoidParams};

const NEIGHBORS_8: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

fn neighbors8(
    labels: &LabelMap,
    row: usize,
    col: usize,
) -> impl Iterator<Item = (usize, usize)> + '_ {
    let (h, w) = (labels.height() as isize, labels.width() as isize);
    NEIGHBORS_8.iter().filter_map(move |&(dr, dc)| {
        let (r, c) = (row as isize + dr, col as isize + dc);
        (r >= 0 && r < h && c >= 0 && c < w).then_some((r as usize, c as usize))
    })
}

/// Zeroes every labeled pixel that has a different nonzero label among its 8 neighbours.
pub fn clean_borders(labels: &LabelMap) -> LabelMap {
    let data = labels
        .iter_indexed()
        .map(|(r, c, l)| {
            let foreign = l != 0
                && neighbors8(labels, r, c).any(|(nr, nc)| {
                    let n = labels.get(nr, nc);
                    n != 0 && n != l
                });
            if foreign {
                0
            } else {
                l
            }
        })
        .collect();
    LabelMap::from_parts(labels.shape(), data)
}

/// Foreground mask of a cleaned label map.
///
/// Fails with [`Error::SeparationViolation`] if two different labels are still
/// 8-adjacent, since their instances would merge in the binary mask.
pub fn labels_to_binary(labels: &LabelMap) -> Result<BinaryMask> {
    for (r, c, l) in labels.iter_indexed().filter(|&(_, _, l)| l != 0) {
        if let Some(other) = neighbors8(labels, r, c)
            .map(|(nr, nc)| labels.get(nr, nc))
            .find(|&n| n != 0 && n != l)
        {
            return Err(Error::SeparationViolation {
                first: l,
                second: other,
                row: r,
                col: c,
            });
        }
    }
    Ok(labels.foreground())
}

/// One binary mask per nonzero label, in ascending label order.
pub fn instance_masks(labels: &LabelMap) -> Vec<(u32, BinaryMask)> {
    labels
        .label_ids()
        .into_iter()
        .map(|id| {
            let mask = BinaryMask::from_fn(labels.width(), labels.height(), |r, c| {
                labels.get(r, c) == id
            });
            (id, mask)
        })
        .collect()
}

/// Pixels whose inside-probability `sigmoid(phi)` exceeds one half.
pub fn threshold_probability(phi: &ScalarField, p: SigmoidParams) -> BinaryMask {
    BinaryMask::from_fn(phi.width(), phi.height(), |r, c| {
        sigmoid(phi.get(r, c), p) > 0.5
    })
}

/// 4-connected components, numbered from 1 in row-major discovery order.
pub fn connected_components(mask: &BinaryMask) -> LabelMap {
    let (w, h) = (mask.width(), mask.height());
    let mut out = vec![0u32; w * h];
    let mut queue = VecDeque::new();
    let mut next = 0u32;

    for start in 0..w * h {
        if mask.data()[start] == 0 || out[start] != 0 {
            continue;
        }
        next += 1;
        out[start] = next;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (r, c) = (i / w, i % w);
            let mut visit = |j: usize| {
                if mask.data()[j] == 1 && out[j] == 0 {
                    out[j] = next;
                    queue.push_back(j);
                }
            };
            if r > 0 {
                visit(i - w);
            }
            if r + 1 < h {
                visit(i + w);
            }
            if c > 0 {
                visit(i - 1);
            }
            if c + 1 < w {
                visit(i + 1);
            }
        }
    }
    LabelMap::from_parts(mask.shape(), out)
}
