//! The four boundary-aware loss terms, their weighted combination, and the
//! analytic backward pass with respect to the predicted SDF and `(alpha, beta)`.
//!
//! Notation used below, per pixel `x` with `p = phi_pred(x)`, `g = phi_gt(x)`:
//!
//! * `T(z)  = 2 sigmoid(z) - 1`
//! * `B(z)  = sigmoid(z) sigmoid(-z)`
//! * `lmhd  = sum B(g) |T(p)|`
//! * `rmhd  = sum B(p) |T(g)|`
//! * `lse   = reduce (T(p) - T(g))^2`
//! * `ce    = reduce -[s log sigmoid(p) + (1 - s) log(1 - sigmoid(p))]`
//!
//! The two boundary terms are always summed over the image. `lse` and `ce` use
//! the configured [`Reduction`].

use serde::{Deserialize, Serialize};

use crate::error::{ensure_same, Error, Result};
use crate::grid::{BinaryMask, ScalarField};
use crate::mappings::{boundary_partials, logistic, tanh_partials, SigmoidParams};
use crate::numeric::CompensatedSum;

/// Lower clamp applied to probabilities before taking logarithms.
pub const CE_LOG_CLAMP: f64 = 1e-12;

/// Weighting coefficients of the unified objective.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub lmhd: f64,
    pub rmhd: f64,
    pub lse: f64,
    pub ce: f64,
}

impl LossWeights {
    pub const DEFAULT: LossWeights = LossWeights {
        lmhd: 0.9,
        rmhd: 0.1,
        lse: 1.0,
        ce: 1.0,
    };

    pub fn new(lmhd: f64, rmhd: f64, lse: f64, ce: f64) -> Result<Self> {
        let w = Self {
            lmhd,
            rmhd,
            lse,
            ce,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("lambda_lmhd", self.lmhd),
            ("lambda_rmhd", self.rmhd),
            ("lambda_lse", self.lse),
            ("lambda_ce", self.ce),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidWeight { name, value });
            }
        }
        Ok(())
    }
}

impl Default for LossWeights {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Pixel reduction used by the squared-error and cross-entropy terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    /// Sum over pixels, the same scale as the boundary terms.
    #[default]
    Sum,
    /// Mean over pixels.
    Mean,
}

impl Reduction {
    fn apply(self, sum: f64, n: usize) -> f64 {
        match self {
            Reduction::Sum => sum,
            Reduction::Mean => sum / n as f64,
        }
    }

    fn scale(self, n: usize) -> f64 {
        match self {
            Reduction::Sum => 1.0,
            Reduction::Mean => 1.0 / n as f64,
        }
    }
}

/// Everything needed to evaluate the unified loss besides the fields themselves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossConfig {
    pub params: SigmoidParams,
    pub weights: LossWeights,
    pub reduction: Reduction,
    /// Propagate `(alpha, beta)` gradients through `B(phi_gt)` and `T(phi_gt)`.
    /// When false those factors are treated as constants.
    pub gt_param_paths: bool,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            params: SigmoidParams::default(),
            weights: LossWeights::DEFAULT,
            reduction: Reduction::Sum,
            gt_param_paths: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub lmhd: f64,
    pub rmhd: f64,
    pub lse: f64,
    pub ce: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LossGradients {
    pub d_phi: ScalarField,
    pub d_alpha: f64,
    pub d_beta: f64,
}

pub fn loss_lmhd(phi_pred: &ScalarField, phi_gt: &ScalarField, p: SigmoidParams) -> Result<f64> {
    ensure_same(phi_gt.shape(), phi_pred.shape())?;
    let mut acc = CompensatedSum::default();
    for (&z_pred, &z_gt) in phi_pred.data().iter().zip(phi_gt.data()) {
        acc.add(lmhd_term(z_pred, z_gt, p));
    }
    Ok(acc.value())
}

pub fn loss_rmhd(phi_pred: &ScalarField, phi_gt: &ScalarField, p: SigmoidParams) -> Result<f64> {
    ensure_same(phi_gt.shape(), phi_pred.shape())?;
    let mut acc = CompensatedSum::default();
    for (&z_pred, &z_gt) in phi_pred.data().iter().zip(phi_gt.data()) {
        acc.add(lmhd_term(z_gt, z_pred, p));
    }
    Ok(acc.value())
}

pub fn loss_lse(
    phi_pred: &ScalarField,
    phi_gt: &ScalarField,
    p: SigmoidParams,
    reduction: Reduction,
) -> Result<f64> {
    ensure_same(phi_gt.shape(), phi_pred.shape())?;
    let mut acc = CompensatedSum::default();
    for (&z_pred, &z_gt) in phi_pred.data().iter().zip(phi_gt.data()) {
        let d = tanh_partials(z_pred, p).value - tanh_partials(z_gt, p).value;
        acc.add(d * d);
    }
    Ok(reduction.apply(acc.value(), phi_pred.len()))
}

pub fn loss_ce(
    phi_pred: &ScalarField,
    s_gt: &BinaryMask,
    p: SigmoidParams,
    reduction: Reduction,
) -> Result<f64> {
    ensure_same(s_gt.shape(), phi_pred.shape())?;
    let mut acc = CompensatedSum::default();
    for (&z, &s) in phi_pred.data().iter().zip(s_gt.data()) {
        acc.add(cross_entropy(p.affine(z), s as f64).0);
    }
    Ok(reduction.apply(acc.value(), phi_pred.len()))
}

pub fn loss_total(
    phi_pred: &ScalarField,
    phi_gt: &ScalarField,
    s_gt: &BinaryMask,
    cfg: &LossConfig,
) -> Result<LossBreakdown> {
    let acc = accumulate(phi_pred, phi_gt, s_gt, cfg, false)?;
    Ok(acc.breakdown(cfg, phi_pred.len()))
}

pub fn loss_backward(
    phi_pred: &ScalarField,
    phi_gt: &ScalarField,
    s_gt: &BinaryMask,
    cfg: &LossConfig,
) -> Result<LossGradients> {
    loss_with_gradients(phi_pred, phi_gt, s_gt, cfg).map(|(_, g)| g)
}

/// Forward and backward in a single pass over the pixels.
pub fn loss_with_gradients(
    phi_pred: &ScalarField,
    phi_gt: &ScalarField,
    s_gt: &BinaryMask,
    cfg: &LossConfig,
) -> Result<(LossBreakdown, LossGradients)> {
    let acc = accumulate(phi_pred, phi_gt, s_gt, cfg, true)?;
    let breakdown = acc.breakdown(cfg, phi_pred.len());
    let grads = LossGradients {
        d_phi: ScalarField::from_parts(phi_pred.shape(), acc.d_phi),
        d_alpha: acc.d_alpha.value(),
        d_beta: acc.d_beta.value(),
    };
    Ok((breakdown, grads))
}

/// Weighted total as an unevaluated `(hi, lo)` pair carrying roughly twice the
/// working precision. Used by finite-difference checks.
pub(crate) fn total_extended(
    phi_pred: &ScalarField,
    phi_gt: &ScalarField,
    s_gt: &BinaryMask,
    cfg: &LossConfig,
) -> Result<(f64, f64)> {
    let acc = accumulate(phi_pred, phi_gt, s_gt, cfg, false)?;
    let n = phi_pred.len();
    let w = cfg.weights;
    let scale = cfg.reduction.scale(n);
    let mut total = CompensatedSum::default();
    for (weight, sum) in [
        (w.lmhd, acc.lmhd),
        (w.rmhd, acc.rmhd),
        (w.lse * scale, acc.lse),
        (w.ce * scale, acc.ce),
    ] {
        let (hi, lo) = sum.parts();
        let prod = weight * hi;
        total.add(prod);
        total.add(weight.mul_add(hi, -prod));
        total.add(weight * lo);
    }
    Ok(total.parts())
}

#[inline]
fn lmhd_term(z_pred: f64, z_gt: f64, p: SigmoidParams) -> f64 {
    boundary_partials(z_gt, p).value * tanh_partials(z_pred, p).value.abs()
}

/// Clamped binary cross-entropy at logit `t` and its derivative with respect to `t`.
#[inline]
fn cross_entropy(t: f64, s: f64) -> (f64, f64) {
    let prob_in = logistic(t);
    let prob_out = logistic(-t);
    let log_in = prob_in.max(CE_LOG_CLAMP).ln();
    let log_out = prob_out.max(CE_LOG_CLAMP).ln();
    // d/dt log(sigmoid(t)) = sigmoid(-t); d/dt log(sigmoid(-t)) = -sigmoid(t).
    // The derivative vanishes where the clamp is active.
    let dlog_in = if prob_in > CE_LOG_CLAMP {
        prob_out
    } else {
        0.0
    };
    let dlog_out = if prob_out > CE_LOG_CLAMP {
        -prob_in
    } else {
        0.0
    };
    let value = -(s * log_in + (1.0 - s) * log_out);
    let dt = -(s * dlog_in + (1.0 - s) * dlog_out);
    (value, dt)
}

/// Subgradient of `|x|` with 0 at the origin.
#[inline]
fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

struct Accumulated {
    lmhd: CompensatedSum,
    rmhd: CompensatedSum,
    lse: CompensatedSum,
    ce: CompensatedSum,
    d_phi: Vec<f64>,
    d_alpha: CompensatedSum,
    d_beta: CompensatedSum,
}

impl Accumulated {
    fn breakdown(&self, cfg: &LossConfig, n: usize) -> LossBreakdown {
        let w = cfg.weights;
        let lmhd = self.lmhd.value();
        let rmhd = self.rmhd.value();
        let lse = cfg.reduction.apply(self.lse.value(), n);
        let ce = cfg.reduction.apply(self.ce.value(), n);
        LossBreakdown {
            lmhd,
            rmhd,
            lse,
            ce,
            total: w.lmhd * lmhd + w.rmhd * rmhd + w.lse * lse + w.ce * ce,
        }
    }
}

fn accumulate(
    phi_pred: &ScalarField,
    phi_gt: &ScalarField,
    s_gt: &BinaryMask,
    cfg: &LossConfig,
    with_grad: bool,
) -> Result<Accumulated> {
    ensure_same(phi_pred.shape(), phi_gt.shape())?;
    ensure_same(phi_pred.shape(), s_gt.shape())?;
    cfg.weights.validate()?;

    let n = phi_pred.len();
    let p = cfg.params;
    let w = cfg.weights;
    let scale = cfg.reduction.scale(n);
    let through_gt = if cfg.gt_param_paths { 1.0 } else { 0.0 };

    let mut acc = Accumulated {
        lmhd: CompensatedSum::default(),
        rmhd: CompensatedSum::default(),
        lse: CompensatedSum::default(),
        ce: CompensatedSum::default(),
        d_phi: if with_grad { vec![0.0; n] } else { Vec::new() },
        d_alpha: CompensatedSum::default(),
        d_beta: CompensatedSum::default(),
    };

    let fields = phi_pred.data().iter().zip(phi_gt.data()).zip(s_gt.data());
    for (i, ((&zp, &zg), &s)) in fields.enumerate() {
        let tp = tanh_partials(zp, p);
        let tg = tanh_partials(zg, p);
        let bp = boundary_partials(zp, p);
        let bg = boundary_partials(zg, p);
        let s = s as f64;
        let t = p.affine(zp);
        let (ce, ce_dt) = cross_entropy(t, s);
        let diff = tp.value - tg.value;

        acc.lmhd.add(bg.value * tp.value.abs());
        acc.rmhd.add(bp.value * tg.value.abs());
        acc.lse.add(diff * diff);
        acc.ce.add(ce);

        if !with_grad {
            continue;
        }

        let sp = sign0(tp.value);
        let sg = sign0(tg.value);
        let lse_coeff = 2.0 * diff * w.lse * scale;
        let ce_coeff = ce_dt * w.ce * scale;

        acc.d_phi[i] = w.lmhd * bg.value * sp * tp.dz
            + w.rmhd * bp.dz * tg.value.abs()
            + lse_coeff * tp.dz
            + ce_coeff * p.alpha();

        let lmhd_da = bg.value * sp * tp.dalpha + through_gt * bg.dalpha * tp.value.abs();
        let lmhd_db = bg.value * sp * tp.dbeta + through_gt * bg.dbeta * tp.value.abs();
        let rmhd_da = bp.dalpha * tg.value.abs() + through_gt * bp.value * sg * tg.dalpha;
        let rmhd_db = bp.dbeta * tg.value.abs() + through_gt * bp.value * sg * tg.dbeta;
        let lse_da = lse_coeff * (tp.dalpha - through_gt * tg.dalpha);
        let lse_db = lse_coeff * (tp.dbeta - through_gt * tg.dbeta);

        acc.d_alpha
            .add(w.lmhd * lmhd_da + w.rmhd * rmhd_da + lse_da + ce_coeff * zp);
        acc.d_beta
            .add(w.lmhd * lmhd_db + w.rmhd * rmhd_db + lse_db + ce_coeff);
    }
    Ok(acc)
}
