//! `xdig explain`: attribute one signal in a target domain.

use super::{
    default_algorithm, load_model_file, parse_algorithm, parse_baseline, parse_formats, parse_rule,
    parse_transform, OutputFormat,
};
use crate::config::config_hash;
use crate::errors::{io_err, CliError};
use crate::io::{read_signal_file, write_result_json, write_scores_csv};
use crate::svg;
use clap::Args;
use std::path::PathBuf;
use xdig::{attribute, DomainKind, PathSpec};

#[derive(Debug, Args)]
pub struct ExplainArgs {
    /// Model JSON file.
    #[arg(long)]
    pub model: PathBuf,
    /// Signal CSV (or dataset CSV together with --row).
    #[arg(long)]
    pub signal: PathBuf,
    /// Row of a dataset file to explain.
    #[arg(long)]
    pub row: Option<usize>,
    /// Inline kind (dft, identity, seasonal_trend:period=N) or a transform
    /// JSON path.
    #[arg(long, default_value = "dft")]
    pub transform: String,
    /// real | complex_split | complex_wirtinger; default picked from the
    /// transform kind.
    #[arg(long)]
    pub algorithm: Option<String>,
    /// zero | filtered:INDICES_TO_KEEP
    #[arg(long, default_value = "zero")]
    pub baseline: String,
    #[arg(long, default_value_t = 1024)]
    pub steps: usize,
    #[arg(long, default_value = "right_riemann")]
    pub rule: String,
    /// Recorded in output metadata.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output index to explain for multi-output models; defaults to the
    /// dataset row's label, else 0.
    #[arg(long)]
    pub output: Option<usize>,
    /// Output path prefix.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "csv,json")]
    pub format: String,
}

pub fn run(args: &ExplainArgs) -> Result<(), CliError> {
    let formats = parse_formats(&args.format)?;
    let model = load_model_file(&args.model)?;
    let file = read_signal_file(&args.signal)?;

    let (x, row_label) = if file.is_dataset() {
        let row = args.row.ok_or_else(|| {
            CliError::config(format!(
                "{} is a dataset file; pass --row to pick a signal",
                args.signal.display()
            ))
        })?;
        file.dataset_row(row)?
    } else {
        (file.as_signal()?, None)
    };

    let transform = parse_transform(&args.transform, x.len(), file.fs)?;
    let rule = parse_rule(&args.rule)?;
    let algorithm = match &args.algorithm {
        Some(s) => parse_algorithm(s)?,
        None => default_algorithm(transform.kind()),
    };

    let output_dim = model.output_dim()?;
    let output = args.output.or(row_label).unwrap_or(0).min(output_dim - 1);
    let graph = if output_dim == 1 {
        model.compile()?
    } else {
        model.with_output(output).compile()?
    };

    let z = transform.forward(&x)?;
    let baseline = parse_baseline(&args.baseline, &transform, x.shape(), &z)?;
    let path = PathSpec::new(baseline, args.steps, rule);
    let result = attribute(&graph, &transform, &x, &path, algorithm)?;

    let hash = config_hash(&serde_json::json!({
        "command": "explain",
        "model": args.model.display().to_string(),
        "signal": args.signal.display().to_string(),
        "row": args.row,
        "transform": args.transform,
        "algorithm": algorithm.as_str(),
        "baseline": args.baseline,
        "steps": args.steps,
        "rule": rule.as_str(),
        "seed": args.seed,
        "output": output,
    }));

    let with_ext = |ext: &str| args.out.with_extension(ext);
    for format in &formats {
        match format {
            OutputFormat::Csv => {
                write_scores_csv(&with_ext("csv"), &result, args.seed, &hash)?;
                if result.transform == DomainKind::Linear {
                    write_component_totals(&with_ext("components.csv"), &result, &hash)?;
                }
            }
            OutputFormat::Json => {
                write_result_json(&with_ext("json"), &result, args.seed, &hash)?;
            }
            OutputFormat::Svg => {
                let chart = svg::stem_chart(
                    &format!(
                        "{} attribution ({} features)",
                        result.transform.as_str(),
                        result.scores.len()
                    ),
                    &result.scores,
                );
                let p = with_ext("svg");
                std::fs::write(&p, chart).map_err(|e| io_err(&p, e))?;
            }
        }
    }

    eprintln!(
        "completeness residual: {:e} (f_input={}, f_baseline={})",
        result.completeness_residual, result.f_input, result.f_baseline
    );
    Ok(())
}

/// Per-component score sums for linear (component) domains: the coarse view
/// alongside the per-(component, time) scores.
fn write_component_totals(
    path: &std::path::Path,
    result: &xdig::AttributionResult,
    hash: &str,
) -> Result<(), CliError> {
    let mut totals: Vec<(String, f64)> = Vec::new();
    for (label, score) in result.labels.iter().zip(result.scores.iter()) {
        match totals.last_mut() {
            Some((l, total)) if l == label => *total += score,
            _ => totals.push((label.clone(), *score)),
        }
    }
    let mut out = crate::config::csv_header(&[
        ("granularity", "component".to_string()),
        ("config", hash.to_string()),
    ]);
    out.push_str("component,score\n");
    for (label, total) in totals {
        out.push_str(&format!("{label},{total}\n"));
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}
