//! Reverse-mode automatic differentiation over real and complex tensors.
//!
//! A [`ComputeGraph`] is a fixed, immutable list of operation nodes in
//! topological order with a single real scalar output. Leaves are bound at
//! evaluation time, so one graph can be evaluated from many threads at once;
//! every evaluation works on its own private buffers.
//!
//! For complex nodes the backward pass propagates the two Wirtinger
//! cogradients independently: `a = d(out)/dz` and `b = d(out)/d(conj z)`,
//! with `d/dz = (d/dp - j d/dq)/2` for `z = p + jq`. For a real-valued
//! output `b` must equal `conj(a)`; the pass measures the deviation instead
//! of assuming it, and reports it as [`GradientSet::conjugate_symmetry_residual`].
//!
//! Gradient convention: [`GradientSet::wirtinger`] is `d(out)/dz` itself,
//! not its conjugate. Autodiff frameworks commonly hand back the conjugate
//! (so that gradient descent can subtract it directly); callers porting
//! update rules from such frameworks must not conjugate again.

mod eval;
mod fdcheck;
pub mod synth;
#[cfg(test)]
mod tests;

pub use eval::{backward, forward_eval};
pub use fdcheck::finite_difference_check;

use crate::matrix::DenseMatrix;
use crate::tensor::{ComplexTensor, RealTensor, TensorValue};
use num_complex::Complex64;
use thiserror::Error;

/// Index of a node inside a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(pub(crate) usize);

/// Whether a node carries real or complex values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Real,
    Complex,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("leaf {slot} is not bound")]
    UnboundLeaf { slot: usize },
    #[error("leaf {slot}: bound {bound:?}, declared {declared:?}")]
    BindingMismatch {
        slot: usize,
        bound: Vec<usize>,
        declared: Vec<usize>,
    },
    #[error("{op}: shape mismatch ({detail})")]
    ShapeMismatch { op: &'static str, detail: String },
    #[error("{op}: operands must both be {expected:?}")]
    KindMismatch {
        op: &'static str,
        expected: ValueKind,
    },
    #[error("{op}: unsupported operand kind")]
    UnsupportedKind { op: &'static str },
    #[error("non-finite intermediate at node {node} ({op})")]
    NonFiniteIntermediate { node: usize, op: &'static str },
    #[error("graph output must be a real scalar, got {kind:?} of shape {shape:?}")]
    BadOutput { kind: ValueKind, shape: Vec<usize> },
    #[error(transparent)]
    Tensor(#[from] crate::tensor::TensorError),
}

/// One recorded operation. Parents always precede the node in the list.
#[derive(Debug, Clone)]
pub(crate) enum Op {
    LeafReal {
        slot: usize,
    },
    LeafComplex {
        slot: usize,
    },
    ConstReal(RealTensor),
    ConstComplex(ComplexTensor),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Scale(NodeId, f64),
    MatVec {
        matrix: DenseMatrix,
        input: NodeId,
    },
    MixChannels {
        matrix: DenseMatrix,
        input: NodeId,
    },
    Conv1d {
        kernel: Vec<f64>,
        input: NodeId,
    },
    Relu(NodeId),
    Sum(NodeId),
    Mean(NodeId),
    Sin(NodeId),
    Cos(NodeId),
    Exp(NodeId),
    Concat(Vec<NodeId>),
    Select {
        input: NodeId,
        index: usize,
    },
    Slice {
        input: NodeId,
        offset: usize,
        len: usize,
    },
    RealPart(NodeId),
    ImagPart(NodeId),
    ComplexJoin {
        re: NodeId,
        im: NodeId,
    },
    Conj(NodeId),
    InverseDft(NodeId),
}

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub op: Op,
    pub kind: ValueKind,
    pub shape: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct LeafInfo {
    pub kind: ValueKind,
    pub shape: Vec<usize>,
    pub node: NodeId,
}

/// Immutable differentiable program with one real scalar output.
#[derive(Debug, Clone)]
pub struct ComputeGraph {
    pub(crate) nodes: Vec<Node>,
    pub(crate) leaves: Vec<LeafInfo>,
    pub(crate) output: NodeId,
}

impl ComputeGraph {
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn leaf_kind(&self, slot: usize) -> ValueKind {
        self.leaves[slot].kind
    }

    pub fn leaf_shape(&self, slot: usize) -> &[usize] {
        &self.leaves[slot].shape
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Leaf-to-tensor map for one evaluation.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    values: Vec<Option<TensorValue>>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, slot: usize, value: impl Into<TensorValue>) -> Self {
        if self.values.len() <= slot {
            self.values.resize(slot + 1, None);
        }
        self.values[slot] = Some(value.into());
        self
    }

    pub fn set(&mut self, slot: usize, value: impl Into<TensorValue>) {
        if self.values.len() <= slot {
            self.values.resize(slot + 1, None);
        }
        self.values[slot] = Some(value.into());
    }

    pub fn get(&self, slot: usize) -> Option<&TensorValue> {
        self.values.get(slot).and_then(|v| v.as_ref())
    }
}

/// Per-leaf gradients of the scalar output.
#[derive(Debug, Clone)]
pub enum LeafGradient {
    Real(Vec<f64>),
    Complex {
        /// d out / d p  (real parts of the leaf)
        d_re: Vec<f64>,
        /// d out / d q  (imaginary parts of the leaf)
        d_im: Vec<f64>,
        /// Wirtinger derivative d out / d z = (d_re - j d_im) / 2
        wirtinger: Vec<Complex64>,
        /// Independently accumulated d out / d conj(z)
        conj_wirtinger: Vec<Complex64>,
    },
}

#[derive(Debug, Clone)]
pub struct GradientSet {
    pub(crate) leaves: Vec<LeafGradient>,
    pub(crate) symmetry_residual: f64,
}

impl GradientSet {
    /// Gradient of a real leaf.
    pub fn real(&self, slot: usize) -> &[f64] {
        match &self.leaves[slot] {
            LeafGradient::Real(g) => g,
            LeafGradient::Complex { .. } => panic!("leaf {slot} is complex"),
        }
    }

    /// Wirtinger derivative of a complex leaf (`d out / d z`, not conjugated).
    pub fn wirtinger(&self, slot: usize) -> &[Complex64] {
        match &self.leaves[slot] {
            LeafGradient::Complex { wirtinger, .. } => wirtinger,
            LeafGradient::Real(_) => panic!("leaf {slot} is real"),
        }
    }

    /// Independently accumulated `d out / d conj(z)` of a complex leaf.
    pub fn conj_wirtinger(&self, slot: usize) -> &[Complex64] {
        match &self.leaves[slot] {
            LeafGradient::Complex { conj_wirtinger, .. } => conj_wirtinger,
            LeafGradient::Real(_) => panic!("leaf {slot} is real"),
        }
    }

    /// Raw partial pair `(d out / d p, d out / d q)` of a complex leaf.
    pub fn real_imag_pair(&self, slot: usize) -> (&[f64], &[f64]) {
        match &self.leaves[slot] {
            LeafGradient::Complex { d_re, d_im, .. } => (d_re, d_im),
            LeafGradient::Real(_) => panic!("leaf {slot} is real"),
        }
    }

    /// Max deviation between `d out / d conj(z)` and `conj(d out / d z)`
    /// observed anywhere in the backward pass. Zero up to roundoff for any
    /// graph with a real scalar output.
    pub fn conjugate_symmetry_residual(&self) -> f64 {
        self.symmetry_residual
    }
}

/// Incrementally builds a [`ComputeGraph`]; all shape and kind checking
/// happens here, at construction time.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<Node>,
    leaves: Vec<LeafInfo>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, op: Op, kind: ValueKind, shape: Vec<usize>) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node { op, kind, shape });
        id
    }

    fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn node_shape(&self, id: NodeId) -> &[usize] {
        &self.nodes[id.0].shape
    }

    pub fn real_leaf(&mut self, shape: Vec<usize>) -> NodeId {
        let slot = self.leaves.len();
        let id = self.push(Op::LeafReal { slot }, ValueKind::Real, shape.clone());
        self.leaves.push(LeafInfo {
            kind: ValueKind::Real,
            shape,
            node: id,
        });
        id
    }

    pub fn complex_leaf(&mut self, shape: Vec<usize>) -> NodeId {
        let slot = self.leaves.len();
        let id = self.push(Op::LeafComplex { slot }, ValueKind::Complex, shape.clone());
        self.leaves.push(LeafInfo {
            kind: ValueKind::Complex,
            shape,
            node: id,
        });
        id
    }

    pub fn constant(&mut self, value: RealTensor) -> NodeId {
        let shape = value.shape().to_vec();
        self.push(Op::ConstReal(value), ValueKind::Real, shape)
    }

    pub fn constant_complex(&mut self, value: ComplexTensor) -> NodeId {
        let shape = value.shape().to_vec();
        self.push(Op::ConstComplex(value), ValueKind::Complex, shape)
    }

    fn binary_same(
        &mut self,
        op_name: &'static str,
        a: NodeId,
        b: NodeId,
    ) -> Result<(ValueKind, Vec<usize>), GraphError> {
        let (na, nb) = (self.node(a), self.node(b));
        if na.kind != nb.kind {
            return Err(GraphError::KindMismatch {
                op: op_name,
                expected: na.kind,
            });
        }
        if na.shape != nb.shape {
            return Err(GraphError::ShapeMismatch {
                op: op_name,
                detail: format!("{:?} vs {:?}", na.shape, nb.shape),
            });
        }
        Ok((na.kind, na.shape.clone()))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, GraphError> {
        let (kind, shape) = self.binary_same("add", a, b)?;
        Ok(self.push(Op::Add(a, b), kind, shape))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, GraphError> {
        let (kind, shape) = self.binary_same("sub", a, b)?;
        Ok(self.push(Op::Sub(a, b), kind, shape))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, GraphError> {
        let (kind, shape) = self.binary_same("mul", a, b)?;
        Ok(self.push(Op::Mul(a, b), kind, shape))
    }

    pub fn scale(&mut self, a: NodeId, factor: f64) -> Result<NodeId, GraphError> {
        let n = self.node(a);
        let (kind, shape) = (n.kind, n.shape.clone());
        Ok(self.push(Op::Scale(a, factor), kind, shape))
    }

    pub fn matvec(&mut self, matrix: DenseMatrix, input: NodeId) -> Result<NodeId, GraphError> {
        let n = self.node(input);
        if n.kind != ValueKind::Real {
            return Err(GraphError::UnsupportedKind { op: "matvec" });
        }
        if n.shape.len() != 1 || n.shape[0] != matrix.cols() {
            return Err(GraphError::ShapeMismatch {
                op: "matvec",
                detail: format!(
                    "matrix {}x{} on {:?}",
                    matrix.rows(),
                    matrix.cols(),
                    n.shape
                ),
            });
        }
        let rows = matrix.rows();
        Ok(self.push(Op::MatVec { matrix, input }, ValueKind::Real, vec![rows]))
    }

    /// Left-multiplies a `[channels, len]` tensor by a square matrix:
    /// `out[c, t] = sum_k M[c, k] * in[k, t]`.
    pub fn mix_channels(
        &mut self,
        matrix: DenseMatrix,
        input: NodeId,
    ) -> Result<NodeId, GraphError> {
        let n = self.node(input);
        if n.kind != ValueKind::Real {
            return Err(GraphError::UnsupportedKind { op: "mix_channels" });
        }
        if n.shape.len() != 2 || matrix.rows() != matrix.cols() || n.shape[0] != matrix.cols() {
            return Err(GraphError::ShapeMismatch {
                op: "mix_channels",
                detail: format!(
                    "matrix {}x{} on {:?}",
                    matrix.rows(),
                    matrix.cols(),
                    n.shape
                ),
            });
        }
        let shape = n.shape.clone();
        Ok(self.push(Op::MixChannels { matrix, input }, ValueKind::Real, shape))
    }

    /// 1-D cross-correlation with zero "same" padding: the output keeps the
    /// input length and tap `k` reads `x[i + k - (taps-1)/2]`.
    pub fn conv1d(&mut self, kernel: Vec<f64>, input: NodeId) -> Result<NodeId, GraphError> {
        let n = self.node(input);
        if n.kind != ValueKind::Real {
            return Err(GraphError::UnsupportedKind { op: "conv1d" });
        }
        if n.shape.len() != 1 || kernel.is_empty() {
            return Err(GraphError::ShapeMismatch {
                op: "conv1d",
                detail: format!("kernel len {} on {:?}", kernel.len(), n.shape),
            });
        }
        let shape = n.shape.clone();
        Ok(self.push(Op::Conv1d { kernel, input }, ValueKind::Real, shape))
    }

    pub fn relu(&mut self, a: NodeId) -> Result<NodeId, GraphError> {
        let n = self.node(a);
        if n.kind != ValueKind::Real {
            return Err(GraphError::UnsupportedKind { op: "relu" });
        }
        let shape = n.shape.clone();
        Ok(self.push(Op::Relu(a), ValueKind::Real, shape))
    }

    pub fn sum(&mut self, a: NodeId) -> Result<NodeId, GraphError> {
        let kind = self.node(a).kind;
        Ok(self.push(Op::Sum(a), kind, vec![1]))
    }

    /// Arithmetic mean of all elements; also the global-average-pool lowering.
    pub fn mean(&mut self, a: NodeId) -> Result<NodeId, GraphError> {
        let kind = self.node(a).kind;
        Ok(self.push(Op::Mean(a), kind, vec![1]))
    }

    pub fn sin(&mut self, a: NodeId) -> Result<NodeId, GraphError> {
        let n = self.node(a);
        let (kind, shape) = (n.kind, n.shape.clone());
        Ok(self.push(Op::Sin(a), kind, shape))
    }

    pub fn cos(&mut self, a: NodeId) -> Result<NodeId, GraphError> {
        let n = self.node(a);
        let (kind, shape) = (n.kind, n.shape.clone());
        Ok(self.push(Op::Cos(a), kind, shape))
    }

    pub fn exp(&mut self, a: NodeId) -> Result<NodeId, GraphError> {
        let n = self.node(a);
        let (kind, shape) = (n.kind, n.shape.clone());
        Ok(self.push(Op::Exp(a), kind, shape))
    }

    pub fn concat(&mut self, parts: Vec<NodeId>) -> Result<NodeId, GraphError> {
        let mut total = 0;
        for &p in &parts {
            let n = self.node(p);
            if n.kind != ValueKind::Real || n.shape.len() != 1 {
                return Err(GraphError::UnsupportedKind { op: "concat" });
            }
            total += n.shape[0];
        }
        Ok(self.push(Op::Concat(parts), ValueKind::Real, vec![total]))
    }

    pub fn select(&mut self, input: NodeId, index: usize) -> Result<NodeId, GraphError> {
        let n = self.node(input);
        if n.kind != ValueKind::Real {
            return Err(GraphError::UnsupportedKind { op: "select" });
        }
        let len: usize = n.shape.iter().product();
        if index >= len {
            return Err(GraphError::ShapeMismatch {
                op: "select",
                detail: format!("index {index} out of {len}"),
            });
        }
        Ok(self.push(Op::Select { input, index }, ValueKind::Real, vec![1]))
    }

    /// Contiguous slice of the flattened input.
    pub fn slice(
        &mut self,
        input: NodeId,
        offset: usize,
        len: usize,
    ) -> Result<NodeId, GraphError> {
        let n = self.node(input);
        if n.kind != ValueKind::Real {
            return Err(GraphError::UnsupportedKind { op: "slice" });
        }
        let total: usize = n.shape.iter().product();
        if offset + len > total {
            return Err(GraphError::ShapeMismatch {
                op: "slice",
                detail: format!("{offset}+{len} out of {total}"),
            });
        }
        Ok(self.push(Op::Slice { input, offset, len }, ValueKind::Real, vec![len]))
    }

    pub fn real_part(&mut self, a: NodeId) -> Result<NodeId, GraphError> {
        let n = self.node(a);
        if n.kind != ValueKind::Complex {
            return Err(GraphError::UnsupportedKind { op: "real_part" });
        }
        let shape = n.shape.clone();
        Ok(self.push(Op::RealPart(a), ValueKind::Real, shape))
    }

    pub fn imag_part(&mut self, a: NodeId) -> Result<NodeId, GraphError> {
        let n = self.node(a);
        if n.kind != ValueKind::Complex {
            return Err(GraphError::UnsupportedKind { op: "imag_part" });
        }
        let shape = n.shape.clone();
        Ok(self.push(Op::ImagPart(a), ValueKind::Real, shape))
    }

    pub fn complex_join(&mut self, re: NodeId, im: NodeId) -> Result<NodeId, GraphError> {
        let (nr, ni) = (self.node(re), self.node(im));
        if nr.kind != ValueKind::Real || ni.kind != ValueKind::Real {
            return Err(GraphError::UnsupportedKind { op: "complex_join" });
        }
        if nr.shape != ni.shape {
            return Err(GraphError::ShapeMismatch {
                op: "complex_join",
                detail: format!("{:?} vs {:?}", nr.shape, ni.shape),
            });
        }
        let shape = nr.shape.clone();
        Ok(self.push(Op::ComplexJoin { re, im }, ValueKind::Complex, shape))
    }

    pub fn conj(&mut self, a: NodeId) -> Result<NodeId, GraphError> {
        let n = self.node(a);
        if n.kind != ValueKind::Complex {
            return Err(GraphError::UnsupportedKind { op: "conj" });
        }
        let shape = n.shape.clone();
        Ok(self.push(Op::Conj(a), ValueKind::Complex, shape))
    }

    /// Unitary inverse DFT as a linear graph op (complex length-n to
    /// complex length-n).
    pub fn inverse_dft(&mut self, a: NodeId) -> Result<NodeId, GraphError> {
        let n = self.node(a);
        if n.kind != ValueKind::Complex || n.shape.len() != 1 {
            return Err(GraphError::UnsupportedKind { op: "inverse_dft" });
        }
        let shape = n.shape.clone();
        Ok(self.push(Op::InverseDft(a), ValueKind::Complex, shape))
    }

    /// Splices `other` into this graph, substituting `leaf_map[slot]` for each
    /// of its leaves, and returns the node corresponding to `other`'s output.
    pub fn inline(
        &mut self,
        other: &ComputeGraph,
        leaf_map: &[NodeId],
    ) -> Result<NodeId, GraphError> {
        assert_eq!(
            leaf_map.len(),
            other.leaves.len(),
            "inline requires one replacement node per leaf"
        );
        let mut mapping: Vec<NodeId> = Vec::with_capacity(other.nodes.len());
        for (idx, node) in other.nodes.iter().enumerate() {
            let mapped = match &node.op {
                Op::LeafReal { slot } | Op::LeafComplex { slot } => {
                    let repl = leaf_map[*slot];
                    let rn = self.node(repl);
                    if rn.kind != node.kind || rn.shape != node.shape {
                        return Err(GraphError::ShapeMismatch {
                            op: "inline",
                            detail: format!(
                                "leaf {slot}: replacement {:?}/{:?} vs {:?}/{:?}",
                                rn.kind, rn.shape, node.kind, node.shape
                            ),
                        });
                    }
                    repl
                }
                op => {
                    let m = |id: NodeId| mapping[id.0];
                    let new_op = match op {
                        Op::LeafReal { .. } | Op::LeafComplex { .. } => unreachable!(),
                        Op::ConstReal(t) => Op::ConstReal(t.clone()),
                        Op::ConstComplex(t) => Op::ConstComplex(t.clone()),
                        Op::Add(a, b) => Op::Add(m(*a), m(*b)),
                        Op::Sub(a, b) => Op::Sub(m(*a), m(*b)),
                        Op::Mul(a, b) => Op::Mul(m(*a), m(*b)),
                        Op::Scale(a, f) => Op::Scale(m(*a), *f),
                        Op::MatVec { matrix, input } => Op::MatVec {
                            matrix: matrix.clone(),
                            input: m(*input),
                        },
                        Op::MixChannels { matrix, input } => Op::MixChannels {
                            matrix: matrix.clone(),
                            input: m(*input),
                        },
                        Op::Conv1d { kernel, input } => Op::Conv1d {
                            kernel: kernel.clone(),
                            input: m(*input),
                        },
                        Op::Relu(a) => Op::Relu(m(*a)),
                        Op::Sum(a) => Op::Sum(m(*a)),
                        Op::Mean(a) => Op::Mean(m(*a)),
                        Op::Sin(a) => Op::Sin(m(*a)),
                        Op::Cos(a) => Op::Cos(m(*a)),
                        Op::Exp(a) => Op::Exp(m(*a)),
                        Op::Concat(parts) => Op::Concat(parts.iter().map(|&p| m(p)).collect()),
                        Op::Select { input, index } => Op::Select {
                            input: m(*input),
                            index: *index,
                        },
                        Op::Slice { input, offset, len } => Op::Slice {
                            input: m(*input),
                            offset: *offset,
                            len: *len,
                        },
                        Op::RealPart(a) => Op::RealPart(m(*a)),
                        Op::ImagPart(a) => Op::ImagPart(m(*a)),
                        Op::ComplexJoin { re, im } => Op::ComplexJoin {
                            re: m(*re),
                            im: m(*im),
                        },
                        Op::Conj(a) => Op::Conj(m(*a)),
                        Op::InverseDft(a) => Op::InverseDft(m(*a)),
                    };
                    self.push(new_op, node.kind, node.shape.clone())
                }
            };
            debug_assert_eq!(mapping.len(), idx);
            mapping.push(mapped);
        }
        Ok(mapping[other.output.0])
    }

    /// Seals the graph; `output` must be a real scalar.
    pub fn finish(self, output: NodeId) -> Result<ComputeGraph, GraphError> {
        let node = &self.nodes[output.0];
        if node.kind != ValueKind::Real || node.shape.iter().product::<usize>() != 1 {
            return Err(GraphError::BadOutput {
                kind: node.kind,
                shape: node.shape.clone(),
            });
        }
        Ok(ComputeGraph {
            nodes: self.nodes,
            leaves: self.leaves,
            output,
        })
    }
}
