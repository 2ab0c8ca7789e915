//! Parameterized sigmoid / tanh mappings and soft boundary maps.
//!
//! Every mapping is a function of the affine argument `t = alpha * z + beta`.
//! The tanh variant is defined as `2 * sigmoid - 1`, which keeps one
//! parameterization across all loss terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ScalarField;

pub const DEFAULT_ALPHA: f64 = 4.0;
pub const DEFAULT_BETA: f64 = 0.0;

/// Slope and offset shared by the sigmoid, tanh and boundary maps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmoidParams {
    alpha: f64,
    beta: f64,
}

impl SigmoidParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if alpha.is_finite() && beta.is_finite() && alpha > 0.0 {
            Ok(Self { alpha, beta })
        } else {
            Err(Error::InvalidParams { alpha, beta })
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub fn affine(&self, z: f64) -> f64 {
        self.alpha * z + self.beta
    }
}

impl Default for SigmoidParams {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
        }
    }
}

/// Standard logistic function, evaluated without overflow for any finite `t`.
#[inline]
pub fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

#[inline]
pub fn sigmoid(z: f64, p: SigmoidParams) -> f64 {
    logistic(p.affine(z))
}

#[inline]
pub fn tanh_ab(z: f64, p: SigmoidParams) -> f64 {
    2.0 * sigmoid(z, p) - 1.0
}

/// `sigmoid(z) * sigmoid(-z)`, both with the same `(alpha, beta)`.
#[inline]
pub fn soft_boundary_value(z: f64, p: SigmoidParams) -> f64 {
    sigmoid(z, p) * sigmoid(-z, p)
}

pub fn soft_boundary(phi: &ScalarField, p: SigmoidParams) -> ScalarField {
    phi.map(|z| soft_boundary_value(z, p))
}

/// Closed-form partial derivatives of the sigmoid and tanh mappings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MappingPartials {
    pub sigmoid_dz: f64,
    pub sigmoid_dalpha: f64,
    pub sigmoid_dbeta: f64,
    pub tanh_dz: f64,
    pub tanh_dalpha: f64,
    pub tanh_dbeta: f64,
}

pub fn mapping_partials(z: f64, p: SigmoidParams) -> MappingPartials {
    let t = p.affine(z);
    // sigma * (1 - sigma), with the complement evaluated directly so it stays
    // accurate when sigma saturates at 1.
    let slope = logistic(t) * logistic(-t);
    MappingPartials {
        sigmoid_dz: p.alpha * slope,
        sigmoid_dalpha: z * slope,
        sigmoid_dbeta: slope,
        tanh_dz: 2.0 * p.alpha * slope,
        tanh_dalpha: 2.0 * z * slope,
        tanh_dbeta: 2.0 * slope,
    }
}

/// Value and partials of the soft boundary map at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct BoundaryPartials {
    pub value: f64,
    pub dz: f64,
    pub dalpha: f64,
    pub dbeta: f64,
}

/// With `u = alpha z + beta`, `v = -alpha z + beta` and `B = s(u) s(v)`:
/// `dB/du = B s(-u)`, `dB/dv = B s(-v)`.
#[inline]
pub(crate) fn boundary_partials(z: f64, p: SigmoidParams) -> BoundaryPartials {
    let u = p.alpha * z + p.beta;
    let v = -p.alpha * z + p.beta;
    let value = logistic(u) * logistic(v);
    let cu = logistic(-u);
    let cv = logistic(-v);
    let skew = value * (cu - cv);
    BoundaryPartials {
        value,
        dz: p.alpha * skew,
        dalpha: z * skew,
        dbeta: value * (cu + cv),
    }
}

/// Value and partials of the tanh mapping at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct TanhPartials {
    pub value: f64,
    pub dz: f64,
    pub dalpha: f64,
    pub dbeta: f64,
}

#[inline]
pub(crate) fn tanh_partials(z: f64, p: SigmoidParams) -> TanhPartials {
    let t = p.affine(z);
    let slope = 2.0 * logistic(t) * logistic(-t);
    TanhPartials {
        value: 2.0 * logistic(t) - 1.0,
        dz: p.alpha * slope,
        dalpha: z * slope,
        dbeta: slope,
    }
}
