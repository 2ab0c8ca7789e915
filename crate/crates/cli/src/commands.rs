use std::fs;
use std::io::Write;
use std::path::PathBuf;

use sdfseg::gradcheck::{self, GradCheckConfig};
use sdfseg::io::{read_field, read_labels, write_field, write_labels};
use sdfseg::{
    cmh, connected_components, fit_sdf, hausdorff, labels_to_sdf, loss_total, mhd, mhd_normalized,
    seg_score, threshold_probability, FitOptions, LabelMap, LossBreakdown, PointSet, SegReport,
};
use serde::Serialize;

use crate::args::{DistanceMode, LossArgs, MatchRuleArg, ParamArgs};
use crate::exit::{self, CliResult, Failure};

fn print_breakdown(out: &mut impl Write, b: &LossBreakdown) -> std::io::Result<()> {
    writeln!(out, "lmhd  {:?}", b.lmhd)?;
    writeln!(out, "rmhd  {:?}", b.rmhd)?;
    writeln!(out, "lse   {:?}", b.lse)?;
    writeln!(out, "ce    {:?}", b.ce)?;
    writeln!(out, "total {:?}", b.total)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

fn ensure_objects(labels: &LabelMap) -> CliResult<()> {
    if labels.label_ids().is_empty() {
        return Err(sdfseg::Error::NoGroundTruthObjects.into());
    }
    Ok(())
}

pub fn sdf(input: PathBuf, output: PathBuf, allow_degenerate: bool) -> CliResult {
    let labels = read_labels(&input)?;
    let (_, sdf) = labels_to_sdf(&labels)?;
    if sdf.degenerate {
        let msg = format!("{}: mask has a single class", input.display());
        if !allow_degenerate {
            return Err(Failure::new(exit::DEGENERATE, msg));
        }
        eprintln!("warning: {msg}; writing constant field");
    }
    write_field(&output, &sdf.field)?;
    Ok(exit::OK)
}

pub fn loss(pred: PathBuf, gt: PathBuf, args: LossArgs, json: bool) -> CliResult {
    let cfg = args.config()?;
    let phi_pred = read_field(&pred)?;
    let labels = read_labels(&gt)?;
    let (mask, sdf) = labels_to_sdf(&labels)?;
    if sdf.degenerate {
        eprintln!("warning: {}: mask has a single class", gt.display());
    }
    let breakdown = loss_total(&phi_pred, &sdf.field, &mask, &cfg)?;
    let mut out = std::io::stdout().lock();
    if json {
        writeln!(out, "{}", to_json(&breakdown))?;
    } else {
        print_breakdown(&mut out, &breakdown)?;
    }
    Ok(exit::OK)
}

pub fn grad_check(gc: GradCheckConfig, json: bool) -> CliResult {
    let report = gradcheck::run(&gc)?;
    let mut out = std::io::stdout().lock();
    if json {
        writeln!(out, "{}", to_json(&report))?;
    } else {
        writeln!(out, "trials        {}", report.trials.len())?;
        writeln!(out, "max_rel_error {:e}", report.max_rel_error)?;
        writeln!(out, "max_abs_error {:e}", report.max_abs_error)?;
        writeln!(out, "{}", if report.passed { "PASS" } else { "FAIL" })?;
    }
    Ok(if report.passed {
        exit::OK
    } else {
        exit::CHECK_FAILED
    })
}

pub fn seg_eval(gt: PathBuf, pred: PathBuf, rule: MatchRuleArg, json: bool) -> CliResult {
    let gt = read_labels(&gt)?;
    let pred = read_labels(&pred)?;
    let report = seg_score(&gt, &pred, rule.into())?;
    let text = if json {
        report.to_json() + "\n"
    } else {
        report.to_csv()
    };
    std::io::stdout().lock().write_all(text.as_bytes())?;
    Ok(exit::OK)
}

pub fn labels(input: PathBuf, output: PathBuf, params: ParamArgs) -> CliResult {
    let p = params.params()?;
    let field = read_field(&input)?;
    let components = connected_components(&threshold_probability(&field, p));
    write_labels(&output, &components)?;
    println!("components {}", components.label_ids().len());
    Ok(exit::OK)
}

#[derive(Serialize)]
struct FitReport {
    steps: usize,
    accepted_steps: usize,
    rejected_steps: usize,
    learning_rate: f64,
    final_learning_rate: f64,
    alpha: f64,
    beta: f64,
    initial_total: f64,
    loss: LossBreakdown,
    components: usize,
    seg: SegReport,
}

pub struct FitPaths {
    pub out_field: Option<PathBuf>,
    pub out_labels: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

pub fn fit(
    gt: PathBuf,
    args: LossArgs,
    opts: FitOptions,
    paths: FitPaths,
    json: bool,
) -> CliResult {
    let cfg = args.config()?;
    let labels = read_labels(&gt)?;
    ensure_objects(&labels)?;
    let (mask, sdf) = labels_to_sdf(&labels)?;
    if sdf.degenerate {
        return Err(Failure::new(
            exit::DEGENERATE,
            format!("{}: mask has a single class", gt.display()),
        ));
    }
    let outcome = fit_sdf(&sdf.field, &mask, &cfg, &opts)?;
    let predicted = connected_components(&threshold_probability(&outcome.field, outcome.params));
    let seg = seg_score(&labels, &predicted, Default::default())?;

    if let Some(path) = &paths.out_field {
        write_field(path, &outcome.field)?;
    }
    if let Some(path) = &paths.out_labels {
        write_labels(path, &predicted)?;
    }
    let report = FitReport {
        steps: opts.steps,
        accepted_steps: outcome.accepted_steps,
        rejected_steps: outcome.rejected_steps,
        learning_rate: opts.learning_rate,
        final_learning_rate: outcome.final_learning_rate,
        alpha: outcome.params.alpha(),
        beta: outcome.params.beta(),
        initial_total: outcome.initial_total,
        loss: outcome.breakdown,
        components: predicted.label_ids().len(),
        seg,
    };
    let report_json = to_json(&report);
    if let Some(path) = &paths.report {
        fs::write(path, format!("{report_json}\n"))?;
    }
    let mut out = std::io::stdout().lock();
    if json {
        writeln!(out, "{report_json}")?;
    } else {
        print_breakdown(&mut out, &report.loss)?;
        writeln!(out, "components {}", report.components)?;
        writeln!(out, "SEG {:?}", report.seg.seg_mean)?;
    }
    Ok(exit::OK)
}

pub fn distance(a: PathBuf, b: PathBuf, mode: DistanceMode) -> CliResult {
    let a = read_labels(&a)?.foreground();
    let b = read_labels(&b)?.foreground();
    if a.shape() != b.shape() {
        return Err(sdfseg::Error::DimensionMismatch {
            expected: a.shape(),
            found: b.shape(),
        }
        .into());
    }
    let value = match mode {
        DistanceMode::Cmh => cmh(&a, &b)?,
        _ => {
            let (pa, pb) = (PointSet::from_mask(&a), PointSet::from_mask(&b));
            match mode {
                DistanceMode::Hausdorff => hausdorff(&pa, &pb)?,
                DistanceMode::Mhd => mhd(&pa, &pb)?,
                _ => mhd_normalized(&pa, &pb)?,
            }
        }
    };
    println!("{value:?}");
    Ok(exit::OK)
}
