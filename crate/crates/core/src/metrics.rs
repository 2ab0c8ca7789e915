//! Reference metrics: Hausdorff and modified Hausdorff distances between pixel
//! sets, the discretized boundary-integral form built on SDFs, and the SEG
//! instance measure.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_same, Error, Result, Shape};
use crate::geometry::{signed_distance, squared_edt_unchecked};
use crate::grid::{BinaryMask, LabelMap};

/// A set of distinct `(row, col)` pixel coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<(usize, usize)>,
}

impl PointSet {
    pub fn new(points: Vec<(usize, usize)>) -> Result<Self> {
        let mut sorted = points.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(w[0].0, w[0].1));
        }
        Ok(Self { points })
    }

    /// Foreground pixels of a mask in row-major order.
    pub fn from_mask(mask: &BinaryMask) -> Self {
        Self {
            points: mask
                .iter_indexed()
                .filter(|&(_, _, v)| v == 1)
                .map(|(r, c, _)| (r, c))
                .collect(),
        }
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// For every point of `from`, the Euclidean distance to the nearest point of `to`.
///
/// Distances come from an exact transform over the joint bounding box, or from a
/// direct scan when the box is much larger than the number of point pairs.
pub fn directed_distances(from: &PointSet, to: &PointSet) -> Result<Vec<f64>> {
    if from.is_empty() || to.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let all = from.points.iter().chain(&to.points);
    let (mut r0, mut c0, mut r1, mut c1) = (usize::MAX, usize::MAX, 0, 0);
    for &(r, c) in all {
        r0 = r0.min(r);
        c0 = c0.min(c);
        r1 = r1.max(r);
        c1 = c1.max(c);
    }
    let shape = Shape::new(c1 - c0 + 1, r1 - r0 + 1);
    let pairs = from.len().saturating_mul(to.len());

    let squared: Vec<u64> = if shape.len() <= pairs.max(1024) {
        let mut grid = vec![1u8; shape.len()];
        for &(r, c) in &to.points {
            grid[(r - r0) * shape.width + (c - c0)] = 0;
        }
        let sq = squared_edt_unchecked(shape, &grid);
        from.points
            .iter()
            .map(|&(r, c)| sq[(r - r0) * shape.width + (c - c0)])
            .collect()
    } else {
        from.points
            .iter()
            .map(|&(ra, ca)| {
                to.points
                    .iter()
                    .map(|&(rb, cb)| {
                        let dr = ra.abs_diff(rb) as u64;
                        let dc = ca.abs_diff(cb) as u64;
                        dr * dr + dc * dc
                    })
                    .min()
                    .unwrap()
            })
            .collect()
    };
    Ok(squared.into_iter().map(|d| (d as f64).sqrt()).collect())
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn sum_of(v: &[f64]) -> f64 {
    v.iter().sum()
}

/// Classical Hausdorff distance: the larger of the two directed sup-inf distances.
pub fn hausdorff(a: &PointSet, b: &PointSet) -> Result<f64> {
    let ab = directed_distances(a, b)?;
    let ba = directed_distances(b, a)?;
    Ok(max_of(&ab).max(max_of(&ba)))
}

/// Modified Hausdorff distance with unnormalized sums of nearest-point distances.
pub fn mhd(a: &PointSet, b: &PointSet) -> Result<f64> {
    let ab = directed_distances(a, b)?;
    let ba = directed_distances(b, a)?;
    Ok(sum_of(&ab) + sum_of(&ba))
}

/// Modified Hausdorff distance with each directed sum divided by its set size.
pub fn mhd_normalized(a: &PointSet, b: &PointSet) -> Result<f64> {
    let ab = directed_distances(a, b)?;
    let ba = directed_distances(b, a)?;
    Ok(sum_of(&ab) / ab.len() as f64 + sum_of(&ba) / ba.len() as f64)
}

/// Foreground pixels with at least one in-image background 4-neighbour.
pub fn boundary_pixels(mask: &BinaryMask) -> Vec<(usize, usize)> {
    let (w, h) = (mask.width(), mask.height());
    mask.iter_indexed()
        .filter(|&(r, c, v)| {
            v == 1
                && ((r > 0 && !mask.is_set(r - 1, c))
                    || (r + 1 < h && !mask.is_set(r + 1, c))
                    || (c > 0 && !mask.is_set(r, c - 1))
                    || (c + 1 < w && !mask.is_set(r, c + 1)))
        })
        .map(|(r, c, _)| (r, c))
        .collect()
}

/// Discretized boundary-integral MHD: `|phi_pred|` summed over the GT contour
/// plus `|phi_gt|` summed over the predicted contour.
pub fn cmh(s_gt: &BinaryMask, s_pred: &BinaryMask) -> Result<f64> {
    ensure_same(s_gt.shape(), s_pred.shape())?;
    let gt = signed_distance(s_gt);
    let pred = signed_distance(s_pred);
    if gt.degenerate || pred.degenerate {
        return Err(Error::DegenerateMask {
            missing: "foreground or background",
        });
    }
    let left: f64 = boundary_pixels(s_gt)
        .into_iter()
        .map(|(r, c)| pred.field.get(r, c).abs())
        .sum();
    let right: f64 = boundary_pixels(s_pred)
        .into_iter()
        .map(|(r, c)| gt.field.get(r, c).abs())
        .sum();
    Ok(left + right)
}

/// When a predicted object counts as a match for a GT object.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MatchRule {
    /// `|R ∩ S| > 0.5 |R|`.
    #[default]
    GtOverlap,
    /// `|R ∩ S| / |R ∪ S| > 0.5`.
    Jaccard,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegEntry {
    pub gt_label: u32,
    pub pred_label: Option<u32>,
    pub jaccard: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegReport {
    pub per_object: Vec<SegEntry>,
    pub seg_mean: f64,
}

impl SegReport {
    /// `gt_label,pred_label,jaccard` rows in ascending GT order, then `SEG,<mean>`.
    /// Unmatched objects leave `pred_label` empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gt_label,pred_label,jaccard\n");
        for e in &self.per_object {
            let pred = e.pred_label.map(|p| p.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{:?}", e.gt_label, pred, e.jaccard);
        }
        let _ = writeln!(out, "SEG,{:?}", self.seg_mean);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// SEG measure: mean Jaccard index of every GT object with its matched prediction.
pub fn seg_score(gt: &LabelMap, pred: &LabelMap, rule: MatchRule) -> Result<SegReport> {
    ensure_same(gt.shape(), pred.shape())?;

    let mut gt_size: BTreeMap<u32, u64> = BTreeMap::new();
    let mut pred_size: BTreeMap<u32, u64> = BTreeMap::new();
    let mut overlap: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (&g, &p) in gt.data().iter().zip(pred.data()) {
        if g != 0 {
            *gt_size.entry(g).or_default() += 1;
        }
        if p != 0 {
            *pred_size.entry(p).or_default() += 1;
        }
        if g != 0 && p != 0 {
            *overlap.entry((g, p)).or_default() += 1;
        }
    }
    if gt_size.is_empty() {
        return Err(Error::NoGroundTruthObjects);
    }

    let mut per_object = Vec::with_capacity(gt_size.len());
    for (&g, &size_r) in &gt_size {
        let mut matched: Option<(u32, f64)> = None;
        for (&(_, p), &inter) in overlap.range((g, 0)..=(g, u32::MAX)) {
            let union = size_r + pred_size[&p] - inter;
            let is_match = match rule {
                MatchRule::GtOverlap => 2 * inter > size_r,
                MatchRule::Jaccard => 2 * inter > union,
            };
            if is_match {
                assert!(
                    matched.is_none(),
                    "two predictions cover more than half of object {g}"
                );
                matched = Some((p, inter as f64 / union as f64));
            }
        }
        per_object.push(SegEntry {
            gt_label: g,
            pred_label: matched.map(|m| m.0),
            jaccard: matched.map_or(0.0, |m| m.1),
        });
    }
    let seg_mean = per_object.iter().map(|e| e.jaccard).sum::<f64>() / per_object.len() as f64;
    Ok(SegReport {
        per_object,
        seg_mean,
    })
}
