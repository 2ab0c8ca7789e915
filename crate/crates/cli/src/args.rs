use clap::{Args, ValueEnum};
use sdfseg::mappings::{DEFAULT_ALPHA, DEFAULT_BETA};
use sdfseg::{LossConfig, LossWeights, MatchRule, Reduction, SigmoidParams};

use crate::exit::CliResult;

#[derive(Args, Clone, Copy, Debug)]
pub struct ParamArgs {
    /// Sigmoid steepness.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Sigmoid offset.
    #[arg(long, default_value_t = DEFAULT_BETA, allow_hyphen_values = true)]
    pub beta: f64,
}

impl ParamArgs {
    pub fn params(&self) -> CliResult<SigmoidParams> {
        Ok(SigmoidParams::new(self.alpha, self.beta)?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ReductionArg {
    #[default]
    Sum,
    Mean,
}

#[derive(Args, Clone, Copy, Debug)]
pub struct LossArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = LossWeights::DEFAULT.lmhd)]
    pub lambda_lmhd: f64,
    #[arg(long, default_value_t = LossWeights::DEFAULT.rmhd)]
    pub lambda_rmhd: f64,
    #[arg(long, default_value_t = LossWeights::DEFAULT.lse)]
    pub lambda_lse: f64,
    #[arg(long, default_value_t = LossWeights::DEFAULT.ce)]
    pub lambda_ce: f64,
    /// Pixel reduction for the squared-error and cross-entropy terms.
    #[arg(long, value_enum, default_value_t = ReductionArg::Sum)]
    pub reduction: ReductionArg,
    /// Treat B(phi_gt) and tanh(phi_gt) as constants when differentiating in (alpha, beta).
    #[arg(long)]
    pub freeze_gt_params: bool,
}

impl LossArgs {
    pub fn config(&self) -> CliResult<LossConfig> {
        Ok(LossConfig {
            params: self.params.params()?,
            weights: LossWeights::new(
                self.lambda_lmhd,
                self.lambda_rmhd,
                self.lambda_lse,
                self.lambda_ce,
            )?,
            reduction: match self.reduction {
                ReductionArg::Sum => Reduction::Sum,
                ReductionArg::Mean => Reduction::Mean,
            },
            gt_param_paths: !self.freeze_gt_params,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum MatchRuleArg {
    /// Intersection covers more than half of the GT object.
    #[default]
    GtOverlap,
    /// Jaccard index above 0.5.
    Jaccard,
}

impl From<MatchRuleArg> for MatchRule {
    fn from(m: MatchRuleArg) -> Self {
        match m {
            MatchRuleArg::GtOverlap => MatchRule::GtOverlap,
            MatchRuleArg::Jaccard => MatchRule::Jaccard,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistanceMode {
    Hausdorff,
    Mhd,
    MhdNormalized,
    Cmh,
}
