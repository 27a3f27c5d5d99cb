//! Signal and dataset CSV files.
//!
//! Signal files: a `# fs=<Hz> n=<len>` comment header, then `n` rows with
//! one channel per column. Dataset files (written by `synth`): a header
//! with `kind=...` plus generator parameters, then one signal per row
//! (two-class rows start with the label column).

use crate::config::{csv_header, OUTPUT_VERSION};
use crate::errors::{io_err, CliError};
use std::collections::BTreeMap;
use std::path::Path;
use xdig::RealTensor;

#[derive(Debug, Clone)]
pub struct SignalFile {
    pub fs: f64,
    pub n: usize,
    pub meta: BTreeMap<String, String>,
    /// Row-major numeric payload (one row per line).
    pub rows: Vec<Vec<f64>>,
}

impl SignalFile {
    pub fn is_dataset(&self) -> bool {
        self.meta.contains_key("kind")
    }

    /// Single- or multi-channel signal from a column-oriented file.
    pub fn as_signal(&self) -> Result<RealTensor, CliError> {
        if self.rows.len() != self.n {
            return Err(CliError::config(format!(
                "signal file declares n={} but has {} data rows",
                self.n,
                self.rows.len()
            )));
        }
        let channels = self.rows[0].len();
        if self.rows.iter().any(|r| r.len() != channels) {
            return Err(CliError::config("ragged signal rows".to_string()));
        }
        if channels == 1 {
            let data: Vec<f64> = self.rows.iter().map(|r| r[0]).collect();
            Ok(RealTensor::vector(&data)?)
        } else {
            // columns are channels; store as [channels, n]
            let mut data = vec![0.0; channels * self.n];
            for (t, row) in self.rows.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    data[c * self.n + t] = v;
                }
            }
            Ok(RealTensor::new(vec![channels, self.n], data)?)
        }
    }

    /// Extracts one signal from a dataset file row.
    pub fn dataset_row(&self, row: usize) -> Result<(RealTensor, Option<usize>), CliError> {
        let r = self
            .rows
            .get(row)
            .ok_or_else(|| CliError::config(format!("row {row} out of {}", self.rows.len())))?;
        let labeled = self
            .meta
            .get("kind")
            .map(|k| k == "two_class")
            .unwrap_or(false);
        let (label, values) = if labeled {
            (Some(r[0] as usize), &r[1..])
        } else {
            (None, &r[..])
        };
        if values.len() != self.n {
            return Err(CliError::config(format!(
                "dataset row has {} values, header says n={}",
                values.len(),
                self.n
            )));
        }
        Ok((RealTensor::vector(values)?, label))
    }
}

pub fn read_signal_file(path: &Path) -> Result<SignalFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut meta = BTreeMap::new();
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            for pair in rest.split_whitespace() {
                if let Some((k, v)) = pair.split_once('=') {
                    meta.insert(k.to_string(), v.to_string());
                }
            }
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => {
                return Err(CliError::config(format!(
                    "{}:{}: {e}",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    let fs: f64 = meta
        .get("fs")
        .ok_or_else(|| CliError::config(format!("{}: missing fs= header", path.display())))?
        .parse()
        .map_err(|e| CliError::config(format!("{}: bad fs ({e})", path.display())))?;
    let n: usize = meta
        .get("n")
        .ok_or_else(|| CliError::config(format!("{}: missing n= header", path.display())))?
        .parse()
        .map_err(|e| CliError::config(format!("{}: bad n ({e})", path.display())))?;
    if rows.is_empty() {
        return Err(CliError::config(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(SignalFile { fs, n, meta, rows })
}

/// Writes a signal in the canonical column layout.
pub fn write_signal_file(
    path: &Path,
    fs: f64,
    x: &RealTensor,
    extra: &[(&str, String)],
) -> Result<(), CliError> {
    let (channels, n) = match x.shape() {
        [n] => (1usize, *n),
        [c, n] => (*c, *n),
        other => {
            return Err(CliError::config(format!(
                "cannot write signal of shape {other:?}"
            )))
        }
    };
    let mut fields = vec![("fs", format!("{fs}")), ("n", format!("{n}"))];
    fields.extend(extra.iter().cloned());
    let mut out = csv_header(&fields);
    for t in 0..n {
        let row: Vec<String> = (0..channels)
            .map(|c| format!("{}", x.data()[c * n + t]))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Header fields of a dataset file.
#[derive(Debug, Clone)]
pub struct DatasetHeader {
    pub kind: String,
    pub fs: f64,
    pub n: usize,
    pub seed: u64,
    pub config: String,
    /// When set, each row starts with the label column.
    pub labeled: bool,
}

/// Writes a dataset file: one signal per row, labeled rows prefixed with
/// the label.
pub fn write_dataset_file(
    path: &Path,
    header: &DatasetHeader,
    samples: &[(RealTensor, usize)],
) -> Result<(), CliError> {
    let mut out = csv_header(&[
        ("kind", header.kind.clone()),
        ("fs", format!("{}", header.fs)),
        ("n", format!("{}", header.n)),
        ("seed", format!("{}", header.seed)),
        ("count", format!("{}", samples.len())),
        ("config", header.config.clone()),
    ]);
    for (x, label) in samples {
        let mut fields: Vec<String> = Vec::with_capacity(x.len() + 1);
        if header.labeled {
            fields.push(format!("{label}"));
        }
        fields.extend(x.data().iter().map(|v| format!("{v}")));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Attribution scores as `label,score` rows under a self-describing header.
///
/// Spectral results are written one-sided: conjugate bin pairs carry equal
/// scores for real signals, so the display view sums each pair under the
/// positive-frequency label. The totals (and hence completeness) are
/// unchanged; the JSON document keeps the full spectrum.
pub fn write_scores_csv(
    path: &Path,
    result: &xdig::AttributionResult,
    seed: u64,
    config_hash: &str,
) -> Result<(), CliError> {
    let onesided = result.transform == xdig::DomainKind::Dft;
    let mut fields = vec![
        ("algorithm", result.algorithm.as_str().to_string()),
        ("transform", result.transform.as_str().to_string()),
        ("n_steps", format!("{}", result.n_steps)),
        ("rule", result.rule.as_str().to_string()),
        ("seed", format!("{seed}")),
        ("config", config_hash.to_string()),
    ];
    if onesided {
        fields.push(("view", "onesided".to_string()));
    }
    let mut out = csv_header(&fields);
    out.push_str(&format!(
        "# f_input={} f_baseline={} completeness_residual={}\n",
        result.f_input, result.f_baseline, result.completeness_residual
    ));
    out.push_str("label,score\n");
    if onesided {
        for (bins, total) in xdig::transforms::fold_conjugate_pairs(&result.scores) {
            out.push_str(&format!("{},{total}\n", result.labels[bins[0]]));
        }
    } else {
        for (label, score) in result.labels.iter().zip(result.scores.iter()) {
            out.push_str(&format!("{label},{score}\n"));
        }
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

/// JSON result document with version/seed/config metadata attached.
pub fn write_result_json(
    path: &Path,
    result: &xdig::AttributionResult,
    seed: u64,
    config_hash: &str,
) -> Result<(), CliError> {
    let doc = serde_json::json!({
        "version": OUTPUT_VERSION,
        "seed": seed,
        "config": config_hash,
        "result": result,
    });
    std::fs::write(
        path,
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n",
    )
    .map_err(|e| io_err(path, e))
}
