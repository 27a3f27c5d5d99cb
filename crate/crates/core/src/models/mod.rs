//! Small differentiable models with analytically known behavior, and their
//! portable file format.
//!
//! The workhorse architecture is a single 1-D convolution (one kernel per
//! output channel, zero "same" padding, cross-correlation orientation),
//! ReLU, and global average pooling. Driven by a pure sinusoid, each pooled
//! channel outputs `a * b / pi` (amplitude times the channel filter's gain
//! at the signal frequency over pi), which makes every attribution testable
//! against a closed form.

mod fir;
#[cfg(test)]
mod tests;

pub use fir::{
    analytic_sinusoid_output, design_fir, frequency_response, FilterDesign, FilterKind, Window,
};

use crate::autodiff::{ComputeGraph, GraphBuilder, NodeId};
use crate::matrix::DenseMatrix;
use crate::tensor::RealTensor;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Model file format version.
pub const FORMAT_VERSION: u32 = 1;

/// Reference two-class configuration: 4 s window at 32 Hz, 65-tap filters
/// with the class boundary at 2.5 Hz. 1 Hz and 4 Hz are bin-aligned.
pub const SINUSOID_FS: f64 = 32.0;
pub const SINUSOID_N: usize = 128;
pub const SINUSOID_TAPS: usize = 65;
pub const SINUSOID_CUTOFF_HZ: f64 = 2.5;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("filter design: {reason}")]
    FilterDesign { reason: String },
    #[error("layer {index} ({layer}): {reason}")]
    LayerShape {
        index: usize,
        layer: &'static str,
        reason: String,
    },
    #[error("model output has {len} values; explain one scalar at a time (add select_output)")]
    NonScalarOutput { len: usize },
    #[error("model file version {found}, this build reads {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("model file parse error at line {line}, column {column} (byte {offset})")]
    Parse {
        line: usize,
        column: usize,
        offset: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] crate::autodiff::GraphError),
}

/// One layer of a [`ModelSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Layer {
    /// One kernel per output channel; input must be single-channel.
    /// Convention is fixed: zero "same" padding, cross-correlation.
    Conv1d {
        kernels: Vec<Vec<f64>>,
    },
    Relu,
    GlobalAvgPool,
    Dense {
        weights: DenseMatrix,
        bias: Vec<f64>,
    },
    SelectOutput {
        index: usize,
    },
}

impl Layer {
    fn name(&self) -> &'static str {
        match self {
            Layer::Conv1d { .. } => "conv1d",
            Layer::Relu => "relu",
            Layer::GlobalAvgPool => "global_avg_pool",
            Layer::Dense { .. } => "dense",
            Layer::SelectOutput { .. } => "select_output",
        }
    }
}

fn one() -> usize {
    1
}

fn is_one(v: &usize) -> bool {
    *v == 1
}

/// Ordered layer list over a length-`n` window sampled at `fs` Hz.
///
/// Multichannel inputs (`channels > 1`, shape `[channels, n]`) are
/// supported for dense read-out stacks; the convolution and pooling layers
/// require a single input channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub version: u32,
    pub fs: f64,
    pub n: usize,
    /// Input channels; multichannel data flattens channel-major
    /// (row-major `[channels, n]`) before dense layers.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub channels: usize,
    pub layers: Vec<Layer>,
}

// Lowering state: the list of per-channel vectors (a flat feature vector is
// the single-channel case).
type Stage = Vec<NodeId>;

impl ModelSpec {
    pub fn new(fs: f64, n: usize, layers: Vec<Layer>) -> Self {
        Self {
            version: FORMAT_VERSION,
            fs,
            n,
            channels: 1,
            layers,
        }
    }

    /// Model over a `[channels, n]` input window.
    pub fn multichannel(fs: f64, channels: usize, n: usize, layers: Vec<Layer>) -> Self {
        Self {
            version: FORMAT_VERSION,
            fs,
            n,
            channels,
            layers,
        }
    }

    /// Two-channel classifier: channel 0 carries the lowpass kernel,
    /// channel 1 the highpass at the same cutoff. Classification is the
    /// argmax of the two pooled channel outputs.
    pub fn sinusoid_classifier(
        fs: f64,
        cutoff_hz: f64,
        taps: usize,
        n: usize,
    ) -> Result<Self, ModelError> {
        let lowpass = design_fir(FilterKind::Lowpass, cutoff_hz, fs, taps)?;
        let highpass = design_fir(FilterKind::Highpass, cutoff_hz, fs, taps)?;
        Ok(Self::new(
            fs,
            n,
            vec![
                Layer::Conv1d {
                    kernels: vec![lowpass, highpass],
                },
                Layer::Relu,
                Layer::GlobalAvgPool,
            ],
        ))
    }

    /// The reference two-class configuration.
    pub fn sinusoid_classifier_default() -> Self {
        Self::sinusoid_classifier(SINUSOID_FS, SINUSOID_CUTOFF_HZ, SINUSOID_TAPS, SINUSOID_N)
            .expect("reference configuration is valid")
    }

    /// Single-channel conv/ReLU/pool model with the given kernel; the model
    /// whose output has the closed form `a * b / pi` on pure sinusoids.
    pub fn single_channel(fs: f64, kernel: Vec<f64>, n: usize) -> Self {
        Self::new(
            fs,
            n,
            vec![
                Layer::Conv1d {
                    kernels: vec![kernel],
                },
                Layer::Relu,
                Layer::GlobalAvgPool,
            ],
        )
    }

    /// Copy with a `select_output` layer appended; the scalar view of one
    /// output of a multi-output model.
    pub fn with_output(&self, index: usize) -> Self {
        let mut spec = self.clone();
        spec.layers.push(Layer::SelectOutput { index });
        spec
    }

    /// Number of scalar outputs the layer stack produces.
    pub fn output_dim(&self) -> Result<usize, ModelError> {
        self.shape_walk().map(|(channels, len)| channels * len)
    }

    /// Walks layer shapes: returns (channels, per-channel length) at the end.
    fn shape_walk(&self) -> Result<(usize, usize), ModelError> {
        let (mut channels, mut len) = (self.channels.max(1), self.n);
        for (index, layer) in self.layers.iter().enumerate() {
            let err = |reason: String| ModelError::LayerShape {
                index,
                layer: layer.name(),
                reason,
            };
            match layer {
                Layer::Conv1d { kernels } => {
                    if self.channels > 1 {
                        return Err(err("conv unavailable for multichannel inputs".into()));
                    }
                    if channels != 1 {
                        return Err(err(format!("needs single-channel input, got {channels}")));
                    }
                    if kernels.is_empty() || kernels.iter().any(|k| k.is_empty()) {
                        return Err(err("kernels must be non-empty".into()));
                    }
                    channels = kernels.len();
                }
                Layer::Relu => {}
                Layer::GlobalAvgPool => {
                    if self.channels > 1 {
                        return Err(err("pooling unavailable for multichannel inputs".into()));
                    }
                    len = 1;
                }
                Layer::Dense { weights, bias } => {
                    let in_dim = channels * len;
                    if weights.cols() != in_dim {
                        return Err(err(format!(
                            "weights {}x{} on input dim {in_dim}",
                            weights.rows(),
                            weights.cols()
                        )));
                    }
                    if bias.len() != weights.rows() {
                        return Err(err(format!(
                            "bias len {} vs {} rows",
                            bias.len(),
                            weights.rows()
                        )));
                    }
                    channels = 1;
                    len = weights.rows();
                }
                Layer::SelectOutput { index: out } => {
                    let dim = channels * len;
                    if *out >= dim {
                        return Err(err(format!("index {out} out of {dim} outputs")));
                    }
                    channels = 1;
                    len = 1;
                }
            }
        }
        Ok((channels, len))
    }

    /// Checks version and layer shape consistency.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.version != FORMAT_VERSION {
            return Err(ModelError::VersionMismatch {
                found: self.version,
                expected: FORMAT_VERSION,
            });
        }
        self.shape_walk()?;
        Ok(())
    }

    /// Lowers the layer stack to a [`ComputeGraph`] with one real leaf of
    /// length `n`; the model must end in a single scalar.
    pub fn compile(&self) -> Result<ComputeGraph, ModelError> {
        let dim = self.output_dim()?;
        if dim != 1 {
            return Err(ModelError::NonScalarOutput { len: dim });
        }
        let mut b = GraphBuilder::new();
        let input = if self.channels > 1 {
            b.real_leaf(vec![self.channels, self.n])
        } else {
            b.real_leaf(vec![self.n])
        };
        let mut stage: Stage = vec![input];
        for layer in &self.layers {
            stage = match layer {
                Layer::Conv1d { kernels } => {
                    let src = stage[0]; // single channel, checked by shape_walk
                    kernels
                        .iter()
                        .map(|k| b.conv1d(k.clone(), src))
                        .collect::<Result<Vec<_>, _>>()?
                }
                Layer::Relu => stage
                    .into_iter()
                    .map(|c| b.relu(c))
                    .collect::<Result<Vec<_>, _>>()?,
                Layer::GlobalAvgPool => stage
                    .into_iter()
                    .map(|c| b.mean(c))
                    .collect::<Result<Vec<_>, _>>()?,
                Layer::Dense { weights, bias } => {
                    let flat = flatten(&mut b, stage)?;
                    let wx = b.matvec(weights.clone(), flat)?;
                    let bias_node = b.constant(RealTensor::vector(bias).expect("finite bias"));
                    vec![b.add(wx, bias_node)?]
                }
                Layer::SelectOutput { index } => {
                    let flat = flatten(&mut b, stage)?;
                    vec![b.select(flat, *index)?]
                }
            };
        }
        let out = flatten(&mut b, stage)?;
        Ok(b.finish(out)?)
    }

    /// Evaluates every scalar output of the stack at `x`.
    pub fn channel_outputs(&self, x: &RealTensor) -> Result<Vec<f64>, ModelError> {
        let dim = self.output_dim()?;
        (0..dim)
            .map(|i| {
                let graph = self.with_output(i).compile()?;
                let bind = crate::autodiff::Bindings::new().bind(0, x.clone());
                Ok(crate::autodiff::forward_eval(&graph, &bind)?)
            })
            .collect()
    }

    /// Argmax over [`Self::channel_outputs`]; exact ties resolve to the
    /// lower index.
    pub fn classify(&self, x: &RealTensor) -> Result<usize, ModelError> {
        let outs = self.channel_outputs(x)?;
        let mut best = 0usize;
        for (i, &v) in outs.iter().enumerate().skip(1) {
            if v > outs[best] {
                best = i;
            }
        }
        Ok(best)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Parses and validates a model document.
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let spec: ModelSpec = serde_json::from_str(text).map_err(|source| {
            let (line, column) = (source.line(), source.column());
            ModelError::Parse {
                line,
                column,
                offset: byte_offset(text, line, column),
                source,
            }
        })?;
        spec.validate()?;
        Ok(spec)
    }
}

fn flatten(b: &mut GraphBuilder, mut stage: Stage) -> Result<NodeId, ModelError> {
    if stage.len() > 1 {
        return Ok(b.concat(stage)?);
    }
    let node = stage.pop().expect("non-empty");
    let shape = b.node_shape(node).to_vec();
    Ok(if shape.len() > 1 {
        // channel-major flatten of a multichannel leaf
        b.slice(node, 0, shape.iter().product())?
    } else {
        node
    })
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in text.split('\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1);
        }
        offset += l.len() + 1;
    }
    text.len()
}

/// Writes the canonical JSON form; a save/load/save cycle is byte-identical.
pub fn save_model(spec: &ModelSpec, path: &std::path::Path) -> Result<(), ModelError> {
    std::fs::write(path, spec.to_json() + "\n")?;
    Ok(())
}

pub fn load_model(path: &std::path::Path) -> Result<ModelSpec, ModelError> {
    let text = std::fs::read_to_string(path)?;
    ModelSpec::from_json(&text)
}
