//! Plain gradient descent of a pixel field against the unified loss.

use crate::error::{ensure_same, Error, Result};
use crate::grid::{BinaryMask, ScalarField};
use crate::losses::{loss_with_gradients, LossBreakdown, LossConfig, LossGradients};
use crate::mappings::SigmoidParams;

pub const DEFAULT_STEPS: usize = 2000;
pub const DEFAULT_LEARNING_RATE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub steps: usize,
    pub learning_rate: f64,
    /// Also descend on `(alpha, beta)`. Off by default.
    pub train_params: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            learning_rate: DEFAULT_LEARNING_RATE,
            train_params: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub field: ScalarField,
    pub params: SigmoidParams,
    pub breakdown: LossBreakdown,
    pub initial_total: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub final_learning_rate: f64,
    /// Total loss of the current iterate after every step.
    pub history: Vec<f64>,
}

/// Descends from `phi = 0`. A step that would increase the total loss is
/// discarded and the learning rate halved, so the loss never increases.
pub fn fit_sdf(
    phi_gt: &ScalarField,
    s_gt: &BinaryMask,
    cfg: &LossConfig,
    opts: &FitOptions,
) -> Result<FitOutcome> {
    if opts.steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if !(opts.learning_rate.is_finite() && opts.learning_rate > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "learning rate must be positive, got {}",
            opts.learning_rate
        )));
    }
    ensure_same(phi_gt.shape(), s_gt.shape())?;

    let shape = phi_gt.shape();
    let mut cfg = *cfg;
    let mut field = ScalarField::filled(shape.width, shape.height, 0.0);
    let (mut breakdown, mut grads) = loss_with_gradients(&field, phi_gt, s_gt, &cfg)?;
    let initial_total = breakdown.total;
    let mut lr = opts.learning_rate;
    let mut accepted = 0;
    let mut rejected = 0;
    let mut history = Vec::with_capacity(opts.steps);

    for _ in 0..opts.steps {
        match candidate(&field, &grads, &cfg, lr, opts.train_params) {
            Some((next_field, next_params)) => {
                let next_cfg = LossConfig {
                    params: next_params,
                    ..cfg
                };
                let (b, g) = loss_with_gradients(&next_field, phi_gt, s_gt, &next_cfg)?;
                if b.total <= breakdown.total {
                    field = next_field;
                    cfg = next_cfg;
                    breakdown = b;
                    grads = g;
                    accepted += 1;
                } else {
                    lr *= 0.5;
                    rejected += 1;
                }
            }
            None => {
                lr *= 0.5;
                rejected += 1;
            }
        }
        history.push(breakdown.total);
    }

    Ok(FitOutcome {
        field,
        params: cfg.params,
        breakdown,
        initial_total,
        accepted_steps: accepted,
        rejected_steps: rejected,
        final_learning_rate: lr,
        history,
    })
}

/// `None` when the step leaves the finite range or makes `alpha` non-positive.
fn candidate(
    field: &ScalarField,
    grads: &LossGradients,
    cfg: &LossConfig,
    lr: f64,
    train_params: bool,
) -> Option<(ScalarField, SigmoidParams)> {
    let data: Vec<f64> = field
        .data()
        .iter()
        .zip(grads.d_phi.data())
        .map(|(&v, &g)| v - lr * g)
        .collect();
    let next = ScalarField::new(field.width(), field.height(), data).ok()?;
    let params = if train_params {
        SigmoidParams::new(
            cfg.params.alpha() - lr * grads.d_alpha,
            cfg.params.beta() - lr * grads.d_beta,
        )
        .ok()?
    } else {
        cfg.params
    };
    Some((next, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::signed_distance;

    fn square_gt() -> (ScalarField, BinaryMask) {
        let s = BinaryMask::from_fn(12, 12, |r, c| (3..9).contains(&r) && (3..9).contains(&c));
        (signed_distance(&s).field, s)
    }

    #[test]
    fn rejects_zero_steps_and_bad_lr() {
        let (phi, s) = square_gt();
        let cfg = LossConfig::default();
        let bad = FitOptions {
            steps: 0,
            ..FitOptions::default()
        };
        assert!(fit_sdf(&phi, &s, &cfg, &bad).is_err());
        let bad = FitOptions {
            learning_rate: 0.0,
            ..FitOptions::default()
        };
        assert!(fit_sdf(&phi, &s, &cfg, &bad).is_err());
    }

    #[test]
    fn single_step_never_increases_loss() {
        let (phi, s) = square_gt();
        let opts = FitOptions {
            steps: 1,
            ..FitOptions::default()
        };
        let out = fit_sdf(&phi, &s, &LossConfig::default(), &opts).unwrap();
        assert_eq!(out.accepted_steps + out.rejected_steps, 1);
        assert!(out.breakdown.total <= out.initial_total);
        if out.rejected_steps == 1 {
            assert_eq!(out.final_learning_rate, opts.learning_rate / 2.0);
        }
    }

    #[test]
    fn history_is_monotone() {
        let (phi, s) = square_gt();
        let opts = FitOptions {
            steps: 200,
            learning_rate: 1000.0,
            ..FitOptions::default()
        };
        let out = fit_sdf(&phi, &s, &LossConfig::default(), &opts).unwrap();
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(out.breakdown.total < out.initial_total);
    }

    #[test]
    fn overflowing_step_is_rejected() {
        let (phi, s) = square_gt();
        let opts = FitOptions {
            steps: 3,
            learning_rate: f64::MAX,
            ..FitOptions::default()
        };
        let out = fit_sdf(&phi, &s, &LossConfig::default(), &opts).unwrap();
        assert!(out.rejected_steps >= 1);
        assert_eq!(out.history[0], out.initial_total);
    }

    #[test]
    fn unfrozen_params_stay_valid() {
        let (phi, s) = square_gt();
        let opts = FitOptions {
            steps: 100,
            train_params: true,
            ..FitOptions::default()
        };
        let out = fit_sdf(&phi, &s, &LossConfig::default(), &opts).unwrap();
        assert!(out.params.alpha() > 0.0);
        assert_ne!(out.params, SigmoidParams::default());
        assert!(out.breakdown.total < out.initial_total);
    }
}
