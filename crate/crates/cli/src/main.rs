//! `sdfseg` command-line interface.

mod args;
mod commands;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sdfseg::fit::{DEFAULT_LEARNING_RATE, DEFAULT_STEPS};
use sdfseg::gradcheck::GradCheckConfig;
use sdfseg::FitOptions;

use args::{DistanceMode, LossArgs, MatchRuleArg, ParamArgs};
use exit::{CliResult, Failure};

#[derive(Parser, Debug)]
#[command(name = "sdfseg", version, about = "Signed-distance segmentation toolkit", after_help = exit::TABLE)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Clean label borders, binarize and write the signed distance field.
    Sdf {
        input: PathBuf,
        output: PathBuf,
        /// Write the constant field for single-class masks instead of failing.
        #[arg(long)]
        allow_degenerate: bool,
    },
    /// Evaluate the unified loss of a predicted field against GT labels.
    Loss {
        pred: PathBuf,
        gt: PathBuf,
        #[command(flatten)]
        loss: LossArgs,
        #[arg(long)]
        json: bool,
    },
    /// Compare analytic gradients with central finite differences.
    GradCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        size: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        json: bool,
    },
    /// Score predicted instance labels against GT with the SEG measure.
    SegEval {
        gt: PathBuf,
        pred: PathBuf,
        /// CSV output (the default).
        #[arg(long, conflicts_with = "json")]
        csv: bool,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value_t = MatchRuleArg::GtOverlap)]
        match_rule: MatchRuleArg,
    },
    /// Threshold a field and write 4-connected instance labels.
    Labels {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Fit a field to GT labels by gradient descent on the unified loss.
    Fit {
        gt: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, default_value_t = DEFAULT_LEARNING_RATE)]
        lr: f64,
        /// Also descend on alpha and beta.
        #[arg(long)]
        train_params: bool,
        #[arg(long)]
        out_field: Option<PathBuf>,
        #[arg(long)]
        out_labels: Option<PathBuf>,
        /// Write the JSON report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        loss: LossArgs,
        #[arg(long)]
        json: bool,
    },
    /// Distance between the foregrounds of two label files.
    Hausdorff {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = DistanceMode::Hausdorff)]
        mode: DistanceMode,
    },
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("SDFSEG_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Failure::new(
            exit::FORMAT,
            format!("SDFSEG_THREADS must be a count, got {raw:?}"),
        )
    })?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new(exit::FORMAT, e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    configure_threads()?;
    match cli.command {
        Command::Sdf {
            input,
            output,
            allow_degenerate,
        } => commands::sdf(input, output, allow_degenerate),
        Command::Loss {
            pred,
            gt,
            loss,
            json,
        } => commands::loss(pred, gt, loss, json),
        Command::GradCheck {
            seed,
            size,
            trials,
            json,
        } => commands::grad_check(
            GradCheckConfig {
                seed,
                size,
                trials,
                ..GradCheckConfig::default()
            },
            json,
        ),
        Command::SegEval {
            gt,
            pred,
            json,
            match_rule,
            ..
        } => commands::seg_eval(gt, pred, match_rule, json),
        Command::Labels {
            input,
            output,
            params,
        } => commands::labels(input, output, params),
        Command::Fit {
            gt,
            steps,
            lr,
            train_params,
            out_field,
            out_labels,
            report,
            loss,
            json,
        } => commands::fit(
            gt,
            loss,
            FitOptions {
                steps,
                learning_rate: lr,
                train_params,
            },
            commands::FitPaths {
                out_field,
                out_labels,
                report,
            },
            json,
        ),
        Command::Hausdorff { a, b, mode } => commands::distance(a, b, mode),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
    }
}
