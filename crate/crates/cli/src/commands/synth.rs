//! `xdig synth`: write seeded synthetic datasets.

use crate::config::config_hash;
use crate::errors::CliError;
use crate::io::{write_dataset_file, DatasetHeader};
use clap::Args;
use std::path::PathBuf;
use xdig::eval::{generate_dataset, DatasetSpec};

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// two_class | trend_seasonal
    #[arg(long, default_value = "two_class")]
    pub kind: String,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampling rate override.
    #[arg(long)]
    pub fs: Option<f64>,
    /// Window length override.
    #[arg(long)]
    pub n: Option<usize>,
    /// Extra points past the window (trend_seasonal only).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &SynthArgs) -> Result<(), CliError> {
    let (spec, labeled) = match args.kind.as_str() {
        "two_class" => {
            let mut spec = DatasetSpec::two_class_default(args.seed);
            if let DatasetSpec::TwoClassSinusoid { fs, n, .. } = &mut spec {
                if let Some(v) = args.fs {
                    *fs = v;
                }
                if let Some(v) = args.n {
                    *n = v;
                }
            }
            (spec, true)
        }
        "trend_seasonal" => {
            let mut spec = DatasetSpec::trend_seasonal_default(args.seed);
            if let DatasetSpec::TrendSeasonal { fs, n, horizon, .. } = &mut spec {
                if let Some(v) = args.fs {
                    *fs = v;
                }
                if let Some(v) = args.n {
                    *n = v;
                }
                if let Some(v) = args.horizon {
                    *horizon = v;
                }
            }
            (spec, false)
        }
        other => {
            return Err(CliError::config(format!(
                "unknown dataset kind {other:?} (two_class, trend_seasonal)"
            )))
        }
    };

    let samples = generate_dataset(&spec, args.count)?;
    let hash = config_hash(&serde_json::json!({
        "command": "synth",
        "spec": spec,
        "count": args.count,
    }));
    // trend windows carry the horizon; the written n reflects the full row
    let row_n = samples.first().map(|(x, _)| x.len()).unwrap_or(spec.n());
    let header = DatasetHeader {
        kind: args.kind.clone(),
        fs: spec.fs(),
        n: row_n,
        seed: args.seed,
        config: hash,
        labeled,
    };
    write_dataset_file(&args.out, &header, &samples)?;
    eprintln!(
        "wrote {} {} samples to {}",
        samples.len(),
        args.kind,
        args.out.display()
    );
    Ok(())
}
