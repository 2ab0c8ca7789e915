//! Finite-difference verification of [`loss_with_gradients`].
//!
//! Central differences are taken on the weighted total carried in extended
//! precision, so the comparison is not limited by cancellation in the pixel sums.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::signed_distance;
use crate::grid::{BinaryMask, ScalarField};
use crate::losses::{loss_with_gradients, total_extended, LossConfig, LossWeights};
use crate::mappings::SigmoidParams;
use crate::synthetic::random_blobs;

/// Sampled values keep `|alpha * z + beta|` at least this far from the `|tanh|` kink.
pub const KINK_MARGIN: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradCheckConfig {
    pub seed: u64,
    pub size: usize,
    pub trials: usize,
    pub step: f64,
    pub rel_tol: f64,
    /// Absolute tolerance applied where the analytic value is below `small`.
    pub abs_tol: f64,
    pub small: f64,
    pub weights: LossWeights,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            size: 16,
            trials: 20,
            step: 1e-4,
            rel_tol: 1e-5,
            abs_tol: 1e-8,
            small: 1e-6,
            weights: LossWeights::DEFAULT,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GradInstance {
    pub phi_pred: ScalarField,
    pub phi_gt: ScalarField,
    pub s_gt: BinaryMask,
    pub params: SigmoidParams,
}

/// Random blob mask, its SDF, random `(alpha, beta)` and a noisy prediction.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, size: usize) -> GradInstance {
    let s_gt = random_blobs(rng, size, size);
    let phi_gt = signed_distance(&s_gt).field;
    let alpha = rng.gen_range(2.0..6.0);
    let beta = loop {
        let beta: f64 = rng.gen_range(-1.0..1.0);
        if phi_gt
            .data()
            .iter()
            .all(|&g| (alpha * g + beta).abs() >= KINK_MARGIN)
        {
            break beta;
        }
    };
    let params = SigmoidParams::new(alpha, beta).expect("alpha > 0");
    let phi_pred = ScalarField::from_fn(size, size, |r, c| {
        let g = phi_gt.get(r, c);
        loop {
            let z = 0.5 * g.clamp(-3.0, 3.0) + rng.gen_range(-1.0..1.0);
            if params.affine(z).abs() >= KINK_MARGIN {
                break z;
            }
        }
    });
    GradInstance {
        phi_pred,
        phi_gt,
        s_gt,
        params,
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TrialResult {
    /// Largest `|analytic - numeric| / |analytic|` over entries with `|analytic| >= small`.
    pub max_rel_error: f64,
    /// Largest `|analytic - numeric|` over entries with `|analytic| < small`.
    pub max_abs_error: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradCheckReport {
    pub trials: Vec<TrialResult>,
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    pub passed: bool,
}

/// Fourth-order central difference
/// `(8 (f(x+h) - f(x-h)) - (f(x+2h) - f(x-2h))) / 12h`.
///
/// The two-point rule's truncation error grows with the third derivative, which
/// scales like `alpha^3`; on pixels whose gradient nearly cancels it alone
/// exceeds the relative tolerance.
fn central_difference(
    mut eval: impl FnMut(f64) -> Result<(f64, f64)>,
    x: f64,
    h: f64,
) -> Result<f64> {
    let mut diff = |step: f64| -> Result<f64> {
        let (hi_p, lo_p) = eval(x + step)?;
        let (hi_m, lo_m) = eval(x - step)?;
        Ok((hi_p - hi_m) + (lo_p - lo_m))
    };
    let near = diff(h)?;
    let far = diff(2.0 * h)?;
    Ok((8.0 * near - far) / (12.0 * h))
}

pub fn check_instance(inst: &GradInstance, gc: &GradCheckConfig) -> Result<TrialResult> {
    let cfg = LossConfig {
        params: inst.params,
        weights: gc.weights,
        ..LossConfig::default()
    };
    let (_, grads) = loss_with_gradients(&inst.phi_pred, &inst.phi_gt, &inst.s_gt, &cfg)?;
    let h = gc.step;
    let mut result = TrialResult {
        passed: true,
        ..TrialResult::default()
    };
    let mut compare = |analytic: f64, numeric: f64| {
        let err = (analytic - numeric).abs();
        if analytic.abs() < gc.small {
            result.max_abs_error = result.max_abs_error.max(err);
            result.passed &= err < gc.abs_tol;
        } else {
            let rel = err / analytic.abs();
            result.max_rel_error = result.max_rel_error.max(rel);
            result.passed &= rel < gc.rel_tol;
        }
    };

    let (w, ht) = (inst.phi_pred.width(), inst.phi_pred.height());
    let mut data = inst.phi_pred.data().to_vec();
    for i in 0..data.len() {
        let base = data[i];
        let numeric = central_difference(
            |v| {
                data[i] = v;
                let field = ScalarField::new(w, ht, data.clone())?;
                total_extended(&field, &inst.phi_gt, &inst.s_gt, &cfg)
            },
            base,
            h,
        )?;
        data[i] = base;
        compare(grads.d_phi.data()[i], numeric);
    }

    let (alpha, beta) = (inst.params.alpha(), inst.params.beta());
    let with_params = |a: f64, b: f64| {
        let params = SigmoidParams::new(a, b)?;
        total_extended(
            &inst.phi_pred,
            &inst.phi_gt,
            &inst.s_gt,
            &LossConfig { params, ..cfg },
        )
    };
    compare(
        grads.d_alpha,
        central_difference(|a| with_params(a, beta), alpha, h)?,
    );
    compare(
        grads.d_beta,
        central_difference(|b| with_params(alpha, b), beta, h)?,
    );
    Ok(result)
}

pub fn run(gc: &GradCheckConfig) -> Result<GradCheckReport> {
    if gc.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if gc.size < 2 {
        return Err(Error::InvalidArgument("size must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(gc.seed);
    let trials = (0..gc.trials)
        .map(|_| check_instance(&random_instance(&mut rng, gc.size), gc))
        .collect::<Result<Vec<_>>>()?;
    Ok(GradCheckReport {
        max_rel_error: trials.iter().map(|t| t.max_rel_error).fold(0.0, f64::max),
        max_abs_error: trials.iter().map(|t| t.max_abs_error).fold(0.0, f64::max),
        passed: trials.iter().all(|t| t.passed),
        trials,
    })
}
