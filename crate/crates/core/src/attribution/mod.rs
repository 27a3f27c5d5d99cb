//! Path-integral attribution in the target domain.
//!
//! All three algorithms integrate model gradients along the straight line
//! `gamma(t) = zhat + t (z - zhat)` in the target domain and score each
//! feature by its displacement-weighted average gradient:
//!
//! - [`ig_real_domain`]: real target domains;
//!   `IG_i = (z_i - zhat_i) * avg_s d(f o T^-1)/dz_i`.
//! - [`ig_complex_split`]: complex domains via independent real/imaginary
//!   partials; `IG_i = avg_s [dg/dp_i * dp_i + dg/dq_i * dq_i]`.
//! - [`ig_complex_wirtinger`]: complex domains via the Wirtinger derivative;
//!   `IG_i = avg_s 2 Re[dg/dz_i * (z_i - zhat_i)]`.
//!
//! The two complex forms compute the same quantity along the same path and
//! agree to roundoff. The engine consumes `dg/dz` directly as produced by
//! [`crate::autodiff`]; unlike autograd stacks that hand back the conjugate,
//! no conjugation step is applied here.
//!
//! The sum of scores approaches `f(x) - f(xhat)` as the step count grows
//! (completeness); the residual is recorded on every result, never dropped.

mod inspect;

pub use inspect::{virtual_inspection_check, InspectionReport};

use crate::autodiff::{self, Bindings, ComputeGraph, GraphBuilder, GraphError, ValueKind};
use crate::tensor::{ComplexTensor, RealTensor, TensorValue};
use crate::transforms::{DomainKind, TargetRepresentation, TransformError, TransformSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AttributionError {
    #[error("{algorithm:?} cannot run on a {domain:?} target domain")]
    DomainMismatch {
        algorithm: Algorithm,
        domain: DomainKind,
    },
    #[error("baseline lives in {baseline:?}, transform produces {expected:?}")]
    BaselineDomain {
        baseline: DomainKind,
        expected: DomainKind,
    },
    #[error("baseline has {got} features, expected {expected}")]
    BaselineLength { got: usize, expected: usize },
    #[error("model must have exactly one real leaf matching the signal shape")]
    ModelShape,
    #[error("n_steps must be at least 1")]
    NoSteps,
    #[error("every coordinate of x equals the baseline; redistribution undefined")]
    AllCoordinatesDegenerate,
    #[error("non-finite score at feature {index}")]
    NonFiniteScore { index: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Quadrature rule for the path integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Samples `t = s/m, s = 1..m`, uniform weights. The default.
    RightRiemann,
    Midpoint,
    Trapezoid,
}

impl Rule {
    /// Quadrature nodes and weights on [0, 1]; `m` is the step count
    /// (trapezoid evaluates `m + 1` points).
    pub fn nodes(&self, m: usize) -> Vec<(f64, f64)> {
        let mf = m as f64;
        match self {
            Rule::RightRiemann => (1..=m).map(|s| (s as f64 / mf, 1.0 / mf)).collect(),
            Rule::Midpoint => (1..=m).map(|s| ((s as f64 - 0.5) / mf, 1.0 / mf)).collect(),
            Rule::Trapezoid => (0..=m)
                .map(|s| {
                    let w = if s == 0 || s == m { 0.5 / mf } else { 1.0 / mf };
                    (s as f64 / mf, w)
                })
                .collect(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::RightRiemann => "right_riemann",
            Rule::Midpoint => "midpoint",
            Rule::Trapezoid => "trapezoid",
        }
    }
}

/// Attribution algorithm identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Real,
    ComplexSplit,
    ComplexWirtinger,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Real => "real",
            Algorithm::ComplexSplit => "complex_split",
            Algorithm::ComplexWirtinger => "complex_wirtinger",
        }
    }
}

/// Integration path family. Only the straight line is implemented; the
/// enum is the extension point for general curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    #[default]
    Linear,
}

/// Baseline, step count and quadrature rule: everything defining the path.
#[derive(Debug, Clone)]
pub struct PathSpec {
    pub baseline: TargetRepresentation,
    pub n_steps: usize,
    pub rule: Rule,
    pub kind: PathKind,
}

impl PathSpec {
    pub fn new(baseline: TargetRepresentation, n_steps: usize, rule: Rule) -> Self {
        Self {
            baseline,
            n_steps,
            rule,
            kind: PathKind::Linear,
        }
    }

    /// Linear path from the transform of the zero signal.
    pub fn zero_baseline(
        transform: &TransformSpec,
        x_shape: &[usize],
        n_steps: usize,
        rule: Rule,
    ) -> Result<Self, TransformError> {
        Ok(Self::new(baseline_zero(transform, x_shape)?, n_steps, rule))
    }
}

/// Per-feature scores in the target domain plus the completeness audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttributionResult {
    pub algorithm: Algorithm,
    pub transform: DomainKind,
    pub labels: Vec<String>,
    pub scores: Vec<f64>,
    pub f_input: f64,
    pub f_baseline: f64,
    /// `sum(scores) - (f_input - f_baseline)`; recorded, never discarded.
    pub completeness_residual: f64,
    pub n_steps: usize,
    pub rule: Rule,
}

impl AttributionResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// `sum(scores) - (f(x) - f(xhat))` recomputed from the stored fields.
pub fn completeness_residual(result: &AttributionResult) -> f64 {
    result.scores.iter().sum::<f64>() - (result.f_input - result.f_baseline)
}

/// Target-domain image of the zero signal. All supported transforms are
/// linear, so this is the zero vector, but it is computed honestly.
pub fn baseline_zero(
    transform: &TransformSpec,
    x_shape: &[usize],
) -> Result<TargetRepresentation, TransformError> {
    transform.forward(&RealTensor::zeros(x_shape.to_vec()))
}

/// Keeps the masked-in features of `z` and zeroes the rest. With an all-true
/// mask the baseline equals the input and every score is zero; masking out a
/// component directs the whole explanation at it.
pub fn baseline_filtered(
    z: &TargetRepresentation,
    keep_mask: &[bool],
) -> Result<TargetRepresentation, AttributionError> {
    if keep_mask.len() != z.len() {
        return Err(AttributionError::BaselineLength {
            got: keep_mask.len(),
            expected: z.len(),
        });
    }
    let values = match &z.values {
        TensorValue::Real(t) => {
            let data = t
                .data()
                .iter()
                .zip(keep_mask.iter())
                .map(|(&v, &keep)| if keep { v } else { 0.0 })
                .collect();
            TensorValue::Real(RealTensor::new(t.shape().to_vec(), data).expect("finite"))
        }
        TensorValue::Complex(t) => {
            let data = t
                .data()
                .iter()
                .zip(keep_mask.iter())
                .map(|(&v, &keep)| if keep { v } else { Complex64::new(0.0, 0.0) })
                .collect();
            TensorValue::Complex(ComplexTensor::new(t.shape().to_vec(), data).expect("finite"))
        }
    };
    Ok(TargetRepresentation {
        domain: z.domain,
        values,
        labels: z.labels.clone(),
    })
}

/// Real-target-domain attribution (identity, linear, seasonal-trend).
pub fn ig_real_domain(
    model: &ComputeGraph,
    transform: &TransformSpec,
    x: &RealTensor,
    path: &PathSpec,
) -> Result<AttributionResult, AttributionError> {
    attribute(model, transform, x, path, Algorithm::Real)
}

/// Complex-target-domain attribution through independent real/imaginary
/// partial derivatives.
pub fn ig_complex_split(
    model: &ComputeGraph,
    transform: &TransformSpec,
    x: &RealTensor,
    path: &PathSpec,
) -> Result<AttributionResult, AttributionError> {
    attribute(model, transform, x, path, Algorithm::ComplexSplit)
}

/// Complex-target-domain attribution through the Wirtinger derivative.
pub fn ig_complex_wirtinger(
    model: &ComputeGraph,
    transform: &TransformSpec,
    x: &RealTensor,
    path: &PathSpec,
) -> Result<AttributionResult, AttributionError> {
    attribute(model, transform, x, path, Algorithm::ComplexWirtinger)
}

/// Computes target-domain attributions for `model` at `x`. The composite
/// `f o T^-1` is built once; path steps evaluate in parallel and reduce in
/// fixed step order, so results do not depend on scheduling.
pub fn attribute(
    model: &ComputeGraph,
    transform: &TransformSpec,
    x: &RealTensor,
    path: &PathSpec,
    algorithm: Algorithm,
) -> Result<AttributionResult, AttributionError> {
    if path.n_steps == 0 {
        return Err(AttributionError::NoSteps);
    }
    let domain = transform.kind();
    let complex_domain = domain.is_complex();
    match algorithm {
        Algorithm::Real if complex_domain => {
            return Err(AttributionError::DomainMismatch { algorithm, domain })
        }
        Algorithm::ComplexSplit | Algorithm::ComplexWirtinger if !complex_domain => {
            return Err(AttributionError::DomainMismatch { algorithm, domain })
        }
        _ => {}
    }

    let z = transform.forward(x)?;
    if path.baseline.domain != domain {
        return Err(AttributionError::BaselineDomain {
            baseline: path.baseline.domain,
            expected: domain,
        });
    }
    if path.baseline.len() != z.len() {
        return Err(AttributionError::BaselineLength {
            got: path.baseline.len(),
            expected: z.len(),
        });
    }

    let graph = compose(model, transform, x.shape())?;
    let nodes = path.rule.nodes(path.n_steps);

    let (scores, f_input, f_baseline) = match (&z.values, &path.baseline.values) {
        (TensorValue::Real(zt), TensorValue::Real(bt)) => {
            run_real(&graph, zt, bt, &nodes, algorithm)?
        }
        (TensorValue::Complex(zt), TensorValue::Complex(bt)) => {
            run_complex(&graph, zt, bt, &nodes, algorithm)?
        }
        _ => unreachable!("baseline domain checked above"),
    };

    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(AttributionError::NonFiniteScore { index });
    }
    let completeness = scores.iter().sum::<f64>() - (f_input - f_baseline);
    Ok(AttributionResult {
        algorithm,
        transform: domain,
        labels: z.labels,
        scores,
        f_input,
        f_baseline,
        completeness_residual: completeness,
        n_steps: path.n_steps,
        rule: path.rule,
    })
}

/// Builds `f o T^-1` with the target-domain leaf as slot 0.
fn compose(
    model: &ComputeGraph,
    transform: &TransformSpec,
    x_shape: &[usize],
) -> Result<ComputeGraph, AttributionError> {
    if model.leaf_count() != 1
        || model.leaf_kind(0) != ValueKind::Real
        || model.leaf_shape(0) != x_shape
    {
        return Err(AttributionError::ModelShape);
    }
    let mut b = GraphBuilder::new();
    let (_, x_node) = transform.build_inverse(&mut b, x_shape)?;
    let out = b.inline(model, &[x_node])?;
    Ok(b.finish(out)?)
}

fn run_real(
    graph: &ComputeGraph,
    z: &RealTensor,
    baseline: &RealTensor,
    nodes: &[(f64, f64)],
    algorithm: Algorithm,
) -> Result<(Vec<f64>, f64, f64), AttributionError> {
    debug_assert_eq!(algorithm, Algorithm::Real);
    let n = z.len();
    let delta: Vec<f64> = z
        .data()
        .iter()
        .zip(baseline.data().iter())
        .map(|(a, b)| a - b)
        .collect();
    let point = |t: f64| -> RealTensor {
        let data = baseline
            .data()
            .iter()
            .zip(delta.iter())
            .map(|(&b, &d)| b + t * d)
            .collect();
        RealTensor::new(z.shape().to_vec(), data).expect("finite path point")
    };

    let step_grads: Vec<Result<Vec<f64>, GraphError>> = nodes
        .par_iter()
        .map(|&(t, _)| {
            let bind = Bindings::new().bind(0, point(t));
            autodiff::backward(graph, &bind).map(|(_, g)| g.real(0).to_vec())
        })
        .collect();

    let mut avg = vec![0.0; n];
    for (res, &(_, w)) in step_grads.into_iter().zip(nodes.iter()) {
        let g = res?;
        for (a, v) in avg.iter_mut().zip(g.iter()) {
            *a += w * v;
        }
    }
    let scores: Vec<f64> = delta.iter().zip(avg.iter()).map(|(d, g)| d * g).collect();

    let f_input = autodiff::forward_eval(graph, &Bindings::new().bind(0, z.clone()))?;
    let f_baseline = autodiff::forward_eval(graph, &Bindings::new().bind(0, baseline.clone()))?;
    Ok((scores, f_input, f_baseline))
}

fn run_complex(
    graph: &ComputeGraph,
    z: &ComplexTensor,
    baseline: &ComplexTensor,
    nodes: &[(f64, f64)],
    algorithm: Algorithm,
) -> Result<(Vec<f64>, f64, f64), AttributionError> {
    let n = z.len();
    let delta: Vec<Complex64> = z
        .data()
        .iter()
        .zip(baseline.data().iter())
        .map(|(a, b)| a - b)
        .collect();
    let point = |t: f64| -> ComplexTensor {
        let data = baseline
            .data()
            .iter()
            .zip(delta.iter())
            .map(|(&b, &d)| b + t * d)
            .collect();
        ComplexTensor::new(z.shape().to_vec(), data).expect("finite path point")
    };

    // per-step contribution of each feature, already algorithm-specific
    let contributions: Vec<Result<Vec<f64>, GraphError>> = nodes
        .par_iter()
        .map(|&(t, _)| {
            let bind = Bindings::new().bind(0, point(t));
            autodiff::backward(graph, &bind).map(|(_, grads)| match algorithm {
                Algorithm::ComplexSplit => {
                    let (dp, dq) = grads.real_imag_pair(0);
                    (0..n)
                        .map(|i| dp[i] * delta[i].re + dq[i] * delta[i].im)
                        .collect()
                }
                Algorithm::ComplexWirtinger => {
                    let w = grads.wirtinger(0);
                    (0..n).map(|i| 2.0 * (w[i] * delta[i]).re).collect()
                }
                Algorithm::Real => unreachable!("checked in attribute"),
            })
        })
        .collect();

    let mut scores = vec![0.0; n];
    for (res, &(_, w)) in contributions.into_iter().zip(nodes.iter()) {
        let c = res?;
        for (s, v) in scores.iter_mut().zip(c.iter()) {
            *s += w * v;
        }
    }

    let f_input = autodiff::forward_eval(graph, &Bindings::new().bind(0, z.clone()))?;
    let f_baseline = autodiff::forward_eval(graph, &Bindings::new().bind(0, baseline.clone()))?;
    Ok((scores, f_input, f_baseline))
}
