//! `xdig eval`: insertion/deletion curves against a random-selection control.

use super::{load_model_file, parse_algorithm, parse_rule, parse_transform};
use crate::config::config_hash;
use crate::errors::{io_err, CliError};
use clap::Args;
use std::path::PathBuf;
use xdig::eval::{generate_dataset, DatasetSpec};
use xdig::{run_curve, CurveConfig, ModelSpec};

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model JSON; defaults to the built-in two-channel sinusoid classifier.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Inline kind or transform JSON path.
    #[arg(long, default_value = "dft")]
    pub transform: String,
    #[arg(long, default_value = "complex_wirtinger")]
    pub algorithm: String,
    /// Dataset kind to generate (two_class).
    #[arg(long, default_value = "two_class")]
    pub dataset: String,
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    /// Comma-separated k percentages.
    #[arg(long, default_value = "3.125,25,50")]
    pub k: String,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 256)]
    pub steps: usize,
    #[arg(long, default_value = "right_riemann")]
    pub rule: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path prefix.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &EvalArgs) -> Result<(), CliError> {
    let model = match &args.model {
        Some(path) => load_model_file(path)?,
        None => ModelSpec::sinusoid_classifier_default(),
    };
    if args.dataset != "two_class" {
        return Err(CliError::config(format!(
            "eval generates two_class datasets; got {:?}",
            args.dataset
        )));
    }
    let mut spec = DatasetSpec::two_class_default(args.seed);
    if let DatasetSpec::TwoClassSinusoid { fs, n, .. } = &mut spec {
        *fs = model.fs;
        *n = model.n;
    }
    let dataset = generate_dataset(&spec, args.count)?;
    let transform = parse_transform(&args.transform, model.n, model.fs)?;

    let k_percents: Vec<f64> = args
        .k
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| CliError::config(format!("bad k value {v:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;

    let cfg = CurveConfig {
        k_percents,
        trials: args.trials,
        seed: args.seed,
        n_steps: args.steps,
        rule: parse_rule(&args.rule)?,
        algorithm: parse_algorithm(&args.algorithm)?,
    };
    let report = run_curve(&model, &transform, &dataset, &cfg)?;

    let hash = config_hash(&serde_json::json!({
        "command": "eval",
        "model": args.model.as_ref().map(|p| p.display().to_string()),
        "transform": args.transform,
        "algorithm": args.algorithm,
        "dataset": spec,
        "count": args.count,
        "k": cfg.k_percents,
        "trials": args.trials,
        "steps": args.steps,
        "rule": cfg.rule.as_str(),
        "seed": args.seed,
    }));

    let csv_path = args.out.with_extension("csv");
    let mut csv = crate::config::csv_header(&[
        ("seed", format!("{}", args.seed)),
        ("samples", format!("{}", report.samples)),
        ("config", hash.clone()),
    ]);
    csv.push_str(&report.to_csv());
    std::fs::write(&csv_path, csv).map_err(|e| io_err(&csv_path, e))?;

    let json_path = args.out.with_extension("json");
    let doc = serde_json::json!({
        "version": crate::config::OUTPUT_VERSION,
        "seed": args.seed,
        "config": hash,
        "report": report,
    });
    std::fs::write(
        &json_path,
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n",
    )
    .map_err(|e| io_err(&json_path, e))?;

    for row in &report.rows {
        println!(
            "{:9} {:9} k={:7.3}%  mean={:.6}  std={:.6}",
            row.mode.as_str(),
            row.method,
            row.k_percent,
            row.mean_distance,
            row.std
        );
    }
    Ok(())
}
