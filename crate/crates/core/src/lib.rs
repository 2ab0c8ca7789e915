//! Boundary-aware segmentation toolkit built on signed distance functions.
//!
//! * [`geometry`]: exact Euclidean distance transforms and SDFs.
//! * [`mappings`]: parameterized sigmoid/tanh and soft boundary maps.
//! * [`losses`]: the boundary, squared-error and cross-entropy terms, their
//!   weighted total and analytic gradients.
//! * [`metrics`]: Hausdorff / modified Hausdorff distances and the SEG measure.
//! * [`instances`]: label cleanup, binarization, thresholding and components.
//! * [`io`]: field and label file formats.

pub mod error;
pub mod fit;
pub mod geometry;
pub mod gradcheck;
pub mod grid;
pub mod instances;
pub mod io;
pub mod losses;
pub mod mappings;
pub mod metrics;
mod numeric;
pub mod synthetic;

pub use error::{Error, Result, Shape};
pub use fit::{fit_sdf, FitOptions, FitOutcome};
pub use geometry::{
    euclidean_distance_transform, signed_distance, squared_distance_transform, SignedDistance,
};
pub use grid::{BinaryMask, LabelMap, ScalarField};
pub use instances::{
    clean_borders, connected_components, instance_masks, labels_to_binary, threshold_probability,
};
pub use losses::{
    loss_backward, loss_ce, loss_lmhd, loss_lse, loss_rmhd, loss_total, loss_with_gradients,
    LossBreakdown, LossConfig, LossGradients, LossWeights, Reduction,
};
pub use mappings::{
    mapping_partials, sigmoid, soft_boundary, tanh_ab, MappingPartials, SigmoidParams,
};
pub use metrics::{
    cmh, hausdorff, mhd, mhd_normalized, seg_score, MatchRule, PointSet, SegEntry, SegReport,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Cleans label borders, binarizes and builds the signed distance field.
pub fn labels_to_sdf(labels: &LabelMap) -> Result<(BinaryMask, SignedDistance)> {
    let mask = labels_to_binary(&clean_borders(labels))?;
    let sdf = signed_distance(&mask);
    Ok((mask, sdf))
}
