pub mod demo;
pub mod eval;
pub mod explain;
pub mod synth;
pub mod validate;

use crate::errors::CliError;
use std::path::Path;
use xdig::transforms::TargetRepresentation;
use xdig::{Algorithm, DomainKind, ModelSpec, Rule, TransformSpec};

pub fn load_model_file(path: &Path) -> Result<ModelSpec, CliError> {
    xdig::models::load_model(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// `--transform` accepts an inline kind (`dft`, `identity`,
/// `seasonal_trend:period=P`) or a path to a transform JSON document.
pub fn parse_transform(spec: &str, n: usize, fs: f64) -> Result<TransformSpec, CliError> {
    match spec {
        "dft" => return Ok(TransformSpec::dft(n, fs)),
        "identity" => return Ok(TransformSpec::identity(n)),
        _ => {}
    }
    if let Some(rest) = spec.strip_prefix("seasonal_trend:") {
        let period = rest
            .strip_prefix("period=")
            .and_then(|p| p.parse::<usize>().ok())
            .ok_or_else(|| {
                CliError::config(format!(
                    "bad seasonal_trend spec {spec:?}; expected seasonal_trend:period=<samples>"
                ))
            })?;
        return Ok(TransformSpec::seasonal_trend(n, period)?);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::config(format!(
            "transform {spec:?} is neither a known inline kind \
             (dft, identity, seasonal_trend:period=N) nor an existing file"
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| crate::errors::io_err(path, e))?;
    let t = TransformSpec::from_json(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    t.validate()?;
    Ok(t)
}

pub fn parse_algorithm(s: &str) -> Result<Algorithm, CliError> {
    match s {
        "real" => Ok(Algorithm::Real),
        "complex_split" => Ok(Algorithm::ComplexSplit),
        "complex_wirtinger" => Ok(Algorithm::ComplexWirtinger),
        other => Err(CliError::config(format!(
            "unknown algorithm {other:?} (real, complex_split, complex_wirtinger)"
        ))),
    }
}

pub fn default_algorithm(kind: DomainKind) -> Algorithm {
    if kind.is_complex() {
        Algorithm::ComplexWirtinger
    } else {
        Algorithm::Real
    }
}

pub fn parse_rule(s: &str) -> Result<Rule, CliError> {
    match s {
        "right_riemann" => Ok(Rule::RightRiemann),
        "midpoint" => Ok(Rule::Midpoint),
        "trapezoid" => Ok(Rule::Trapezoid),
        other => Err(CliError::config(format!(
            "unknown rule {other:?} (right_riemann, midpoint, trapezoid)"
        ))),
    }
}

/// `--baseline zero` or `--baseline filtered:<keep-spec>` where the keep
/// spec lists feature indices and ranges to keep, e.g. `filtered:0,4-7,124`.
pub fn parse_baseline(
    spec: &str,
    transform: &TransformSpec,
    x_shape: &[usize],
    z: &TargetRepresentation,
) -> Result<TargetRepresentation, CliError> {
    if spec == "zero" {
        return Ok(xdig::baseline_zero(transform, x_shape)?);
    }
    let Some(keep) = spec.strip_prefix("filtered:") else {
        return Err(CliError::config(format!(
            "unknown baseline {spec:?} (zero, filtered:<indices>)"
        )));
    };
    let indices = parse_index_spec(keep, z.len())?;
    let mut mask = vec![false; z.len()];
    for i in indices {
        mask[i] = true;
    }
    Ok(xdig::baseline_filtered(z, &mask)?)
}

/// Comma-separated indices and inclusive ranges: `0,4-7,12`.
pub fn parse_index_spec(spec: &str, len: usize) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => {
                let lo = a.parse::<usize>();
                let hi = b.parse::<usize>();
                match (lo, hi) {
                    (Ok(lo), Ok(hi)) if lo <= hi => (lo, hi),
                    _ => return Err(CliError::config(format!("bad index range {part:?}"))),
                }
            }
            None => {
                let i = part
                    .parse::<usize>()
                    .map_err(|e| CliError::config(format!("bad index {part:?}: {e}")))?;
                (i, i)
            }
        };
        if hi >= len {
            return Err(CliError::config(format!(
                "index {hi} out of range for {len} features"
            )));
        }
        out.extend(lo..=hi);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

pub fn parse_formats(spec: &str) -> Result<Vec<OutputFormat>, CliError> {
    spec.split(',')
        .map(|f| match f.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(CliError::config(format!(
                "unknown format {other:?} (csv, json, svg)"
            ))),
        })
        .collect()
}
