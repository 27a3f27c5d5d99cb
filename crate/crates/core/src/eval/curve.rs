//! Insertion/deletion faithfulness curves with a random-selection control.
//!
//! Protocol per sample: attribute in the target domain, pick the top k% of
//! features, rebuild the signal with those features deleted (replaced by
//! baseline values) or inserted (everything else replaced), and measure
//! `|f(x_mod) - f(x)|`. The random arm redraws k% of the features uniformly,
//! fresh per trial. A faithful attribution deletes to large distances and
//! inserts to small ones compared to the random arm.
//!
//! For spectral domains the conjugate bin pairs count as one feature and are
//! always kept or removed together, which keeps every modified spectrum
//! Hermitian and every modified signal real.

use super::EvalError;
use crate::attribution::{attribute, baseline_zero, Algorithm, PathSpec, Rule};
use crate::models::ModelSpec;
use crate::rng::XorShift64Star;
use crate::tensor::{RealTensor, TensorValue};
use crate::transforms::{conjugate_pair_groups, DomainKind, TargetRepresentation, TransformSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterventionMode {
    /// Replace the selected features with baseline values.
    #[serde(rename = "deletion")]
    Delete,
    /// Keep only the selected features; replace the rest.
    #[serde(rename = "insertion")]
    Insert,
}

impl InterventionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            InterventionMode::Delete => "deletion",
            InterventionMode::Insert => "insertion",
        }
    }
}

/// Number of features a `k%` selection takes from `len`: rounded, half away
/// from zero, so 100% is everything and 0% is nothing.
fn selection_count(len: usize, k_percent: f64) -> Result<usize, EvalError> {
    if !(0.0..=100.0).contains(&k_percent) {
        return Err(EvalError::BadKPercent { k: k_percent });
    }
    Ok(((k_percent / 100.0) * len as f64).round() as usize)
}

/// Indices of the k% largest scores; ties broken toward the lower index.
pub fn select_top_k(scores: &[f64], k_percent: f64) -> Result<Vec<usize>, EvalError> {
    let count = selection_count(scores.len(), k_percent)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    let mut picked: Vec<usize> = order.into_iter().take(count).collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Top-k selection over conjugate-pair groups of a full spectrum: each
/// group's score is the sum of its bins, k% counts groups, and the returned
/// indices always contain both members of a selected pair.
pub fn select_top_k_paired(scores: &[f64], k_percent: f64) -> Result<Vec<usize>, EvalError> {
    let groups = conjugate_pair_groups(scores.len());
    let totals: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().map(|&b| scores[b]).sum())
        .collect();
    let chosen = select_top_k(&totals, k_percent)?;
    let mut bins: Vec<usize> = chosen.into_iter().flat_map(|g| groups[g].clone()).collect();
    bins.sort_unstable();
    Ok(bins)
}

/// Applies an intervention in the target domain and maps back to time.
pub fn intervene(
    transform: &TransformSpec,
    z: &TargetRepresentation,
    indices: &[usize],
    mode: InterventionMode,
    baseline: &TargetRepresentation,
) -> Result<RealTensor, EvalError> {
    let len = z.len();
    if indices.iter().any(|&i| i >= len) {
        return Err(EvalError::BadIndices { len });
    }
    if baseline.len() != len {
        return Err(EvalError::BadIndices { len });
    }
    let mut selected = vec![false; len];
    for &i in indices {
        selected[i] = true;
    }
    // delete: selected -> baseline; insert: unselected -> baseline
    let take_baseline = |i: usize| match mode {
        InterventionMode::Delete => selected[i],
        InterventionMode::Insert => !selected[i],
    };
    let values = match (&z.values, &baseline.values) {
        (TensorValue::Real(zt), TensorValue::Real(bt)) => {
            let data: Vec<f64> = (0..len)
                .map(|i| {
                    if take_baseline(i) {
                        bt.data()[i]
                    } else {
                        zt.data()[i]
                    }
                })
                .collect();
            TensorValue::Real(RealTensor::new(zt.shape().to_vec(), data).expect("finite"))
        }
        (TensorValue::Complex(zt), TensorValue::Complex(bt)) => {
            let data: Vec<Complex64> = (0..len)
                .map(|i| {
                    if take_baseline(i) {
                        bt.data()[i]
                    } else {
                        zt.data()[i]
                    }
                })
                .collect();
            TensorValue::Complex(
                crate::tensor::ComplexTensor::new(zt.shape().to_vec(), data).expect("finite"),
            )
        }
        _ => return Err(EvalError::MixedDomains),
    };
    Ok(transform.inverse(&values)?)
}

/// One averaged point of an insertion/deletion curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub mode: InterventionMode,
    pub method: String,
    pub k_percent: f64,
    pub mean_distance: f64,
    pub std: f64,
    pub trials: usize,
}

/// Full insertion/deletion evaluation: both modes, both arms, all k values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterventionReport {
    pub algorithm: Algorithm,
    pub transform: DomainKind,
    pub samples: usize,
    pub trials: usize,
    pub seed: u64,
    pub n_steps: usize,
    pub rule: Rule,
    pub rows: Vec<CurveRow>,
}

impl InterventionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// CSV with one curve point per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mode,method,k_percent,mean_distance,std,trials\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.mode.as_str(),
                row.method,
                row.k_percent,
                row.mean_distance,
                row.std,
                row.trials
            ));
        }
        out
    }

    pub fn row(&self, mode: InterventionMode, method: &str, k_percent: f64) -> Option<&CurveRow> {
        self.rows
            .iter()
            .find(|r| r.mode == mode && r.method == method && r.k_percent == k_percent)
    }
}

#[derive(Debug, Clone)]
pub struct CurveConfig {
    pub k_percents: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub n_steps: usize,
    pub rule: Rule,
    pub algorithm: Algorithm,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            k_percents: vec![3.125, 25.0, 50.0],
            trials: 20,
            seed: 0,
            n_steps: 256,
            rule: Rule::RightRiemann,
            algorithm: Algorithm::ComplexWirtinger,
        }
    }
}

// per-sample distances: dist[k][mode] for the attribution arm,
// rand[k][mode] = mean over trials
struct SampleOutcome {
    ig: Vec<[f64; 2]>,
    random: Vec<[f64; 2]>,
}

/// Runs the full protocol. The explained scalar is the labeled output
/// channel of `model` (or its only output). Samples evaluate in parallel;
/// per-trial random draws come from substreams of `(seed, sample, trial)`,
/// so the report is bit-identical for a given configuration regardless of
/// scheduling.
pub fn run_curve(
    model: &ModelSpec,
    transform: &TransformSpec,
    dataset: &[(RealTensor, usize)],
    cfg: &CurveConfig,
) -> Result<InterventionReport, EvalError> {
    if dataset.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    // report rows are keyed by ascending k
    let mut cfg = cfg.clone();
    cfg.k_percents
        .sort_by(|a, b| a.partial_cmp(b).expect("finite k"));
    let cfg = &cfg;
    for &k in &cfg.k_percents {
        selection_count(1, k)?;
    }
    let output_dim = model.output_dim()?;
    let graphs: Vec<crate::autodiff::ComputeGraph> = (0..output_dim)
        .map(|i| Ok(model.with_output(i).compile()?))
        .collect::<Result<_, EvalError>>()?;
    let paired = transform.kind() == DomainKind::Dft;
    let modes = [InterventionMode::Delete, InterventionMode::Insert];

    let outcomes: Vec<Result<SampleOutcome, EvalError>> = dataset
        .par_iter()
        .enumerate()
        .map(|(sample_idx, (x, label))| {
            let graph = &graphs[(*label).min(output_dim - 1)];
            let bind = crate::autodiff::Bindings::new().bind(0, x.clone());
            let f_orig = crate::autodiff::forward_eval(graph, &bind)?;

            let z = transform.forward(x)?;
            let baseline = baseline_zero(transform, x.shape())?;
            let path = PathSpec::new(baseline.clone(), cfg.n_steps, cfg.rule);
            let result = attribute(graph, transform, x, &path, cfg.algorithm)?;

            let feature_count = if paired {
                conjugate_pair_groups(z.len()).len()
            } else {
                z.len()
            };

            let distance = |indices: &[usize], mode: InterventionMode| -> Result<f64, EvalError> {
                // an intervention that keeps every feature leaves the sample
                // untouched; skip the transform roundtrip so the endpoint
                // distances (deletion at k=0, insertion at k=100) are exact
                let untouched = match mode {
                    InterventionMode::Delete => indices.is_empty(),
                    InterventionMode::Insert => indices.len() == z.len(),
                };
                if untouched {
                    return Ok(0.0);
                }
                let x_mod = intervene(transform, &z, indices, mode, &baseline)?;
                let bind = crate::autodiff::Bindings::new().bind(0, x_mod);
                Ok((crate::autodiff::forward_eval(graph, &bind)? - f_orig).abs())
            };

            let mut ig = Vec::with_capacity(cfg.k_percents.len());
            let mut random = Vec::with_capacity(cfg.k_percents.len());
            for &k in &cfg.k_percents {
                let picked = if paired {
                    select_top_k_paired(&result.scores, k)?
                } else {
                    select_top_k(&result.scores, k)?
                };
                ig.push([distance(&picked, modes[0])?, distance(&picked, modes[1])?]);

                let count = selection_count(feature_count, k)?;
                let mut sums = [0.0, 0.0];
                for trial in 0..cfg.trials {
                    let stream_id = (sample_idx as u64) * 1_000_003 + trial as u64;
                    let mut rng = XorShift64Star::substream(cfg.seed, stream_id);
                    let chosen_groups = rng.sample_indices(feature_count, count);
                    let indices: Vec<usize> = if paired {
                        let groups = conjugate_pair_groups(z.len());
                        let mut bins: Vec<usize> = chosen_groups
                            .iter()
                            .flat_map(|&g| groups[g].clone())
                            .collect();
                        bins.sort_unstable();
                        bins
                    } else {
                        chosen_groups
                    };
                    sums[0] += distance(&indices, modes[0])?;
                    sums[1] += distance(&indices, modes[1])?;
                }
                random.push([sums[0] / cfg.trials as f64, sums[1] / cfg.trials as f64]);
            }
            Ok(SampleOutcome { ig, random })
        })
        .collect();

    let outcomes: Vec<SampleOutcome> = outcomes.into_iter().collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    let n_samples = dataset.len();
    for (ki, &k) in cfg.k_percents.iter().enumerate() {
        for (mi, mode) in modes.iter().enumerate() {
            for (method, pick_ig) in [("ig_ranked", true), ("random", false)] {
                let values: Vec<f64> = outcomes
                    .iter()
                    .map(|s| {
                        if pick_ig {
                            s.ig[ki][mi]
                        } else {
                            s.random[ki][mi]
                        }
                    })
                    .collect();
                let mean = values.iter().sum::<f64>() / n_samples as f64;
                let var =
                    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n_samples as f64;
                rows.push(CurveRow {
                    mode: *mode,
                    method: method.to_string(),
                    k_percent: k,
                    mean_distance: mean,
                    std: var.sqrt(),
                    trials: if pick_ig { 1 } else { cfg.trials },
                });
            }
        }
    }

    Ok(InterventionReport {
        algorithm: cfg.algorithm,
        transform: transform.kind(),
        samples: n_samples,
        trials: cfg.trials,
        seed: cfg.seed,
        n_steps: cfg.n_steps,
        rule: cfg.rule,
        rows,
    })
}
