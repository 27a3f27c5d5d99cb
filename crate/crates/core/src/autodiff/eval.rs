//! Forward evaluation and the reverse adjoint pass.

use super::{Bindings, ComputeGraph, GradientSet, GraphError, LeafGradient, Node, Op, ValueKind};
use crate::fourier;
use crate::tensor::{ComplexTensor, RealTensor, TensorValue};
use num_complex::Complex64;

/// Evaluates the graph at the given bindings and returns the scalar output.
pub fn forward_eval(graph: &ComputeGraph, bindings: &Bindings) -> Result<f64, GraphError> {
    let values = graph.eval_values(bindings)?;
    Ok(scalar_of(&values[graph.output.0]))
}

/// Runs forward + reverse passes; returns the scalar output and the
/// gradients with respect to every leaf.
pub fn backward(
    graph: &ComputeGraph,
    bindings: &Bindings,
) -> Result<(f64, GradientSet), GraphError> {
    graph.backward(bindings)
}

fn scalar_of(value: &TensorValue) -> f64 {
    match value {
        TensorValue::Real(t) => t.data()[0],
        TensorValue::Complex(_) => unreachable!("output checked real at construction"),
    }
}

fn real_data(value: &TensorValue) -> &[f64] {
    match value {
        TensorValue::Real(t) => t.data(),
        TensorValue::Complex(_) => unreachable!("kind checked at construction"),
    }
}

fn complex_data(value: &TensorValue) -> &[Complex64] {
    match value {
        TensorValue::Complex(t) => t.data(),
        TensorValue::Real(_) => unreachable!("kind checked at construction"),
    }
}

/// Same-padding cross-correlation; tap `k` reads `x[i + k - center]`.
fn conv1d_forward(kernel: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let center = (kernel.len() - 1) / 2;
    let mut y = vec![0.0; n];
    for (i, out) in y.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, &w) in kernel.iter().enumerate() {
            let j = i as isize + k as isize - center as isize;
            if j >= 0 && (j as usize) < n {
                acc += w * x[j as usize];
            }
        }
        *out = acc;
    }
    y
}

/// Adjoint of [`conv1d_forward`]: `dx[m] = sum_k w[k] * dy[m + center - k]`.
fn conv1d_adjoint(kernel: &[f64], dy: &[f64], dx: &mut [f64]) {
    let n = dy.len();
    let center = (kernel.len() - 1) / 2;
    for (m, out) in dx.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, &w) in kernel.iter().enumerate() {
            let j = m as isize + center as isize - k as isize;
            if j >= 0 && (j as usize) < n {
                acc += w * dy[j as usize];
            }
        }
        *out += acc;
    }
}

enum Adjoint {
    Real(Vec<f64>),
    /// `wirt = d out / d node`, `conj = d out / d conj(node)`, accumulated
    /// independently so their conjugate symmetry can be verified.
    Complex {
        wirt: Vec<Complex64>,
        conj: Vec<Complex64>,
    },
}

impl Adjoint {
    fn zeros(node: &Node) -> Self {
        let len: usize = node.shape.iter().product();
        match node.kind {
            ValueKind::Real => Adjoint::Real(vec![0.0; len]),
            ValueKind::Complex => Adjoint::Complex {
                wirt: vec![Complex64::new(0.0, 0.0); len],
                conj: vec![Complex64::new(0.0, 0.0); len],
            },
        }
    }

    fn real_mut(&mut self) -> &mut [f64] {
        match self {
            Adjoint::Real(v) => v,
            _ => unreachable!(),
        }
    }

    fn complex_mut(&mut self) -> (&mut [Complex64], &mut [Complex64]) {
        match self {
            Adjoint::Complex { wirt, conj } => (wirt, conj),
            _ => unreachable!(),
        }
    }

    fn complex_cloned(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        match self {
            Adjoint::Complex { wirt, conj } => (wirt.clone(), conj.clone()),
            _ => unreachable!(),
        }
    }
}

impl ComputeGraph {
    pub(crate) fn eval_values(&self, bindings: &Bindings) -> Result<Vec<TensorValue>, GraphError> {
        let mut values: Vec<TensorValue> = Vec::with_capacity(self.nodes.len());
        for (idx, node) in self.nodes.iter().enumerate() {
            let value = self.eval_node(idx, node, bindings, &values)?;
            if let Some(op) = non_finite(&value).then(|| op_name(&node.op)) {
                return Err(GraphError::NonFiniteIntermediate { node: idx, op });
            }
            values.push(value);
        }
        Ok(values)
    }

    fn eval_node(
        &self,
        _idx: usize,
        node: &Node,
        bindings: &Bindings,
        values: &[TensorValue],
    ) -> Result<TensorValue, GraphError> {
        let v = |id: super::NodeId| &values[id.0];
        Ok(match &node.op {
            Op::LeafReal { slot } | Op::LeafComplex { slot } => {
                let bound = bindings
                    .get(*slot)
                    .ok_or(GraphError::UnboundLeaf { slot: *slot })?;
                let kind_ok = matches!(
                    (&node.kind, bound),
                    (ValueKind::Real, TensorValue::Real(_))
                        | (ValueKind::Complex, TensorValue::Complex(_))
                );
                if !kind_ok || bound.shape() != node.shape.as_slice() {
                    return Err(GraphError::BindingMismatch {
                        slot: *slot,
                        bound: bound.shape().to_vec(),
                        declared: node.shape.clone(),
                    });
                }
                bound.clone()
            }
            Op::ConstReal(t) => TensorValue::Real(t.clone()),
            Op::ConstComplex(t) => TensorValue::Complex(t.clone()),
            Op::Add(a, b) => zip_same(v(*a), v(*b), &node.shape, |x, y| x + y, |x, y| x + y),
            Op::Sub(a, b) => zip_same(v(*a), v(*b), &node.shape, |x, y| x - y, |x, y| x - y),
            Op::Mul(a, b) => zip_same(v(*a), v(*b), &node.shape, |x, y| x * y, |x, y| x * y),
            Op::Scale(a, f) => map_value(v(*a), &node.shape, |x| x * f, |x| x * f),
            Op::MatVec { matrix, input } => {
                real_value(matrix.matvec(real_data(v(*input))), &node.shape)
            }
            Op::MixChannels { matrix, input } => {
                let x = real_data(v(*input));
                let c = matrix.rows();
                let m = node.shape[1];
                let mut out = vec![0.0; c * m];
                for ci in 0..c {
                    for k in 0..c {
                        let a = matrix.get(ci, k);
                        if a == 0.0 {
                            continue;
                        }
                        let src = &x[k * m..(k + 1) * m];
                        let dst = &mut out[ci * m..(ci + 1) * m];
                        for (d, s) in dst.iter_mut().zip(src.iter()) {
                            *d += a * s;
                        }
                    }
                }
                real_value(out, &node.shape)
            }
            Op::Conv1d { kernel, input } => {
                real_value(conv1d_forward(kernel, real_data(v(*input))), &node.shape)
            }
            Op::Relu(a) => map_value(v(*a), &node.shape, |x| x.max(0.0), |_| unreachable!()),
            Op::Sum(a) => reduce_value(v(*a), &node.shape, 1.0),
            Op::Mean(a) => {
                let len = v(*a).len() as f64;
                reduce_value(v(*a), &node.shape, 1.0 / len)
            }
            Op::Sin(a) => map_value(v(*a), &node.shape, f64::sin, Complex64::sin),
            Op::Cos(a) => map_value(v(*a), &node.shape, f64::cos, Complex64::cos),
            Op::Exp(a) => map_value(v(*a), &node.shape, f64::exp, Complex64::exp),
            Op::Concat(parts) => {
                let mut out = Vec::with_capacity(node.shape[0]);
                for &p in parts {
                    out.extend_from_slice(real_data(v(p)));
                }
                real_value(out, &node.shape)
            }
            Op::Select { input, index } => {
                real_value(vec![real_data(v(*input))[*index]], &node.shape)
            }
            Op::Slice { input, offset, len } => real_value(
                real_data(v(*input))[*offset..*offset + *len].to_vec(),
                &node.shape,
            ),
            Op::RealPart(a) => real_value(
                complex_data(v(*a)).iter().map(|z| z.re).collect(),
                &node.shape,
            ),
            Op::ImagPart(a) => real_value(
                complex_data(v(*a)).iter().map(|z| z.im).collect(),
                &node.shape,
            ),
            Op::ComplexJoin { re, im } => {
                let p = real_data(v(*re));
                let q = real_data(v(*im));
                let data = p
                    .iter()
                    .zip(q.iter())
                    .map(|(&a, &b)| Complex64::new(a, b))
                    .collect();
                complex_value(data, &node.shape)
            }
            Op::Conj(a) => map_value(v(*a), &node.shape, |_| unreachable!(), |z| z.conj()),
            Op::InverseDft(a) => {
                complex_value(fourier::unitary_idft(complex_data(v(*a))), &node.shape)
            }
        })
    }

    pub(crate) fn backward(&self, bindings: &Bindings) -> Result<(f64, GradientSet), GraphError> {
        let values = self.eval_values(bindings)?;
        let output = scalar_of(&values[self.output.0]);

        let mut adjoints: Vec<Adjoint> = self.nodes.iter().map(Adjoint::zeros).collect();
        adjoints[self.output.0].real_mut()[0] = 1.0;
        let mut symmetry_residual: f64 = 0.0;

        for idx in (0..self.nodes.len()).rev() {
            let node = &self.nodes[idx];
            match node.kind {
                ValueKind::Real => {
                    let d_out = match &adjoints[idx] {
                        Adjoint::Real(v) => v.clone(),
                        _ => unreachable!(),
                    };
                    self.backprop_real(idx, node, &d_out, &values, &mut adjoints);
                }
                ValueKind::Complex => {
                    let (a_out, b_out) = adjoints[idx].complex_cloned();
                    self.backprop_complex(
                        node,
                        &a_out,
                        &b_out,
                        &values,
                        &mut adjoints,
                        &mut symmetry_residual,
                    );
                }
            }
        }

        let leaves = self
            .leaves
            .iter()
            .map(|leaf| match &adjoints[leaf.node.0] {
                Adjoint::Real(g) => LeafGradient::Real(g.clone()),
                Adjoint::Complex { wirt, conj } => {
                    let mut d_re = Vec::with_capacity(wirt.len());
                    let mut d_im = Vec::with_capacity(wirt.len());
                    for (a, b) in wirt.iter().zip(conj.iter()) {
                        // d/dp = a + b, d/dq = j (a - b); imaginary residue
                        // measures conjugate-symmetry violation.
                        let dp = a + b;
                        let dq = Complex64::i() * (a - b);
                        symmetry_residual = symmetry_residual.max(dp.im.abs()).max(dq.im.abs());
                        d_re.push(dp.re);
                        d_im.push(dq.re);
                    }
                    LeafGradient::Complex {
                        d_re,
                        d_im,
                        wirtinger: wirt.clone(),
                        conj_wirtinger: conj.clone(),
                    }
                }
            })
            .collect();

        Ok((
            output,
            GradientSet {
                leaves,
                symmetry_residual,
            },
        ))
    }

    fn backprop_real(
        &self,
        idx: usize,
        node: &Node,
        d_out: &[f64],
        values: &[TensorValue],
        adjoints: &mut [Adjoint],
    ) {
        match &node.op {
            Op::LeafReal { .. } | Op::ConstReal(_) => {}
            Op::Add(a, b) => {
                accumulate_real(adjoints, *a, d_out, 1.0);
                accumulate_real(adjoints, *b, d_out, 1.0);
            }
            Op::Sub(a, b) => {
                accumulate_real(adjoints, *a, d_out, 1.0);
                accumulate_real(adjoints, *b, d_out, -1.0);
            }
            Op::Mul(a, b) => {
                let xa = real_data(&values[a.0]).to_vec();
                let xb = real_data(&values[b.0]).to_vec();
                for (i, (da, &x)) in adjoints[a.0]
                    .real_mut()
                    .iter_mut()
                    .zip(xb.iter())
                    .enumerate()
                {
                    *da += d_out[i] * x;
                }
                for (i, (db, &x)) in adjoints[b.0]
                    .real_mut()
                    .iter_mut()
                    .zip(xa.iter())
                    .enumerate()
                {
                    *db += d_out[i] * x;
                }
            }
            Op::Scale(a, f) => accumulate_real(adjoints, *a, d_out, *f),
            Op::MatVec { matrix, input } => {
                let dx = matrix.matvec_transpose(d_out);
                accumulate_real(adjoints, *input, &dx, 1.0);
            }
            Op::MixChannels { matrix, input } => {
                let c = matrix.rows();
                let m = node.shape[1];
                let din = adjoints[input.0].real_mut();
                for k in 0..c {
                    for ci in 0..c {
                        let a = matrix.get(ci, k);
                        if a == 0.0 {
                            continue;
                        }
                        let src = &d_out[ci * m..(ci + 1) * m];
                        let dst = &mut din[k * m..(k + 1) * m];
                        for (d, s) in dst.iter_mut().zip(src.iter()) {
                            *d += a * s;
                        }
                    }
                }
            }
            Op::Conv1d { kernel, input } => {
                conv1d_adjoint(kernel, d_out, adjoints[input.0].real_mut());
            }
            Op::Relu(a) => {
                // subgradient 0 at exactly 0
                let x = real_data(&values[a.0]).to_vec();
                let din = adjoints[a.0].real_mut();
                for (i, (d, &xv)) in din.iter_mut().zip(x.iter()).enumerate() {
                    if xv > 0.0 {
                        *d += d_out[i];
                    }
                }
            }
            Op::Sum(a) => match &mut adjoints[a.0] {
                Adjoint::Real(din) => {
                    for d in din.iter_mut() {
                        *d += d_out[0];
                    }
                }
                Adjoint::Complex { .. } => unreachable!("real sum of complex input"),
            },
            Op::Mean(a) => {
                let len = values[a.0].len() as f64;
                let w = d_out[0] / len;
                match &mut adjoints[a.0] {
                    Adjoint::Real(din) => {
                        for d in din.iter_mut() {
                            *d += w;
                        }
                    }
                    Adjoint::Complex { .. } => unreachable!(),
                }
            }
            Op::Sin(a) => {
                let x = real_data(&values[a.0]).to_vec();
                let din = adjoints[a.0].real_mut();
                for (i, (d, &xv)) in din.iter_mut().zip(x.iter()).enumerate() {
                    *d += d_out[i] * xv.cos();
                }
            }
            Op::Cos(a) => {
                let x = real_data(&values[a.0]).to_vec();
                let din = adjoints[a.0].real_mut();
                for (i, (d, &xv)) in din.iter_mut().zip(x.iter()).enumerate() {
                    *d -= d_out[i] * xv.sin();
                }
            }
            Op::Exp(a) => {
                // forward value is exp(x)
                let y = real_data(&values[idx]).to_vec();
                let din = adjoints[a.0].real_mut();
                for (i, (d, &yv)) in din.iter_mut().zip(y.iter()).enumerate() {
                    *d += d_out[i] * yv;
                }
            }
            Op::Concat(parts) => {
                let mut offset = 0;
                for &p in parts {
                    let len = values[p.0].len();
                    let seg = &d_out[offset..offset + len];
                    accumulate_real(adjoints, p, seg, 1.0);
                    offset += len;
                }
            }
            Op::Select { input, index } => {
                adjoints[input.0].real_mut()[*index] += d_out[0];
            }
            Op::Slice { input, offset, len } => {
                let din = adjoints[input.0].real_mut();
                for i in 0..*len {
                    din[offset + i] += d_out[i];
                }
            }
            Op::RealPart(a) => {
                // r = (z + conj z)/2: dr/dz = dr/d(conj z) = 1/2
                let (wa, wb) = adjoints[a.0].complex_mut();
                for (i, &d) in d_out.iter().enumerate() {
                    wa[i] += Complex64::new(0.5 * d, 0.0);
                    wb[i] += Complex64::new(0.5 * d, 0.0);
                }
            }
            Op::ImagPart(a) => {
                // m = (z - conj z)/(2j): dm/dz = -j/2, dm/d(conj z) = +j/2
                let (wa, wb) = adjoints[a.0].complex_mut();
                for (i, &d) in d_out.iter().enumerate() {
                    wa[i] += Complex64::new(0.0, -0.5 * d);
                    wb[i] += Complex64::new(0.0, 0.5 * d);
                }
            }
            Op::LeafComplex { .. }
            | Op::ConstComplex(_)
            | Op::ComplexJoin { .. }
            | Op::Conj(_)
            | Op::InverseDft(_) => unreachable!("complex-valued op in real backprop"),
        }
    }

    fn backprop_complex(
        &self,
        node: &Node,
        a_out: &[Complex64],
        b_out: &[Complex64],
        values: &[TensorValue],
        adjoints: &mut [Adjoint],
        symmetry_residual: &mut f64,
    ) {
        match &node.op {
            Op::LeafComplex { .. } | Op::ConstComplex(_) => {}
            Op::Add(a, b) => {
                accumulate_complex(adjoints, *a, a_out, b_out, Complex64::new(1.0, 0.0));
                accumulate_complex(adjoints, *b, a_out, b_out, Complex64::new(1.0, 0.0));
            }
            Op::Sub(a, b) => {
                accumulate_complex(adjoints, *a, a_out, b_out, Complex64::new(1.0, 0.0));
                accumulate_complex(adjoints, *b, a_out, b_out, Complex64::new(-1.0, 0.0));
            }
            Op::Mul(a, b) => {
                let za = complex_data(&values[a.0]).to_vec();
                let zb = complex_data(&values[b.0]).to_vec();
                {
                    let (wa, wbj) = adjoints[a.0].complex_mut();
                    for i in 0..a_out.len() {
                        wa[i] += a_out[i] * zb[i];
                        wbj[i] += b_out[i] * zb[i].conj();
                    }
                }
                {
                    let (wa, wbj) = adjoints[b.0].complex_mut();
                    for i in 0..a_out.len() {
                        wa[i] += a_out[i] * za[i];
                        wbj[i] += b_out[i] * za[i].conj();
                    }
                }
            }
            Op::Scale(a, f) => {
                accumulate_complex(adjoints, *a, a_out, b_out, Complex64::new(*f, 0.0));
            }
            Op::Sum(a) => {
                let (wa, wb) = adjoints[a.0].complex_mut();
                for w in wa.iter_mut() {
                    *w += a_out[0];
                }
                for w in wb.iter_mut() {
                    *w += b_out[0];
                }
            }
            Op::Mean(a) => {
                let len = values[a.0].len() as f64;
                let (wa, wb) = adjoints[a.0].complex_mut();
                for w in wa.iter_mut() {
                    *w += a_out[0] / len;
                }
                for w in wb.iter_mut() {
                    *w += b_out[0] / len;
                }
            }
            Op::Sin(a) => {
                let z = complex_data(&values[a.0]).to_vec();
                holomorphic_chain(adjoints, *a, a_out, b_out, |i| z[i].cos());
            }
            Op::Cos(a) => {
                let z = complex_data(&values[a.0]).to_vec();
                holomorphic_chain(adjoints, *a, a_out, b_out, |i| -z[i].sin());
            }
            Op::Exp(a) => {
                let z = complex_data(&values[a.0]).to_vec();
                holomorphic_chain(adjoints, *a, a_out, b_out, |i| z[i].exp());
            }
            Op::ComplexJoin { re, im } => {
                // for real p: dg/dp = a + b; for real q: dg/dq = j(a - b).
                // Both are real exactly when b == conj(a); the imaginary
                // residue goes into the symmetry check instead of the grads.
                {
                    let dre = adjoints[re.0].real_mut();
                    for (i, d) in dre.iter_mut().enumerate() {
                        let dp = a_out[i] + b_out[i];
                        *symmetry_residual = symmetry_residual.max(dp.im.abs());
                        *d += dp.re;
                    }
                }
                {
                    let dim = adjoints[im.0].real_mut();
                    for (i, d) in dim.iter_mut().enumerate() {
                        let dq = Complex64::i() * (a_out[i] - b_out[i]);
                        *symmetry_residual = symmetry_residual.max(dq.im.abs());
                        *d += dq.re;
                    }
                }
            }
            Op::Conj(a) => {
                // w = conj(z): dg/dz = b_out, dg/d(conj z) = a_out
                let (wa, wb) = adjoints[a.0].complex_mut();
                for i in 0..a_out.len() {
                    wa[i] += b_out[i];
                    wb[i] += a_out[i];
                }
            }
            Op::InverseDft(a) => {
                // w = M z with M the (symmetric) unitary IDFT matrix:
                // dg/dz += M^T a = M a;  dg/d(conj z) += conj(M)^T b = F b.
                let da = fourier::unitary_idft(a_out);
                let db = fourier::unitary_dft(b_out);
                let (wa, wb) = adjoints[a.0].complex_mut();
                for i in 0..da.len() {
                    wa[i] += da[i];
                    wb[i] += db[i];
                }
            }
            Op::LeafReal { .. }
            | Op::ConstReal(_)
            | Op::MatVec { .. }
            | Op::MixChannels { .. }
            | Op::Conv1d { .. }
            | Op::Relu(_)
            | Op::Concat(_)
            | Op::Select { .. }
            | Op::Slice { .. }
            | Op::RealPart(_)
            | Op::ImagPart(_) => {
                unreachable!("real-valued op in complex backprop")
            }
        }
    }
}

// Non-finite data is caught by the per-node scan with a node index, so the
// value constructors here skip the tensor-level finite check.
fn real_value(data: Vec<f64>, shape: &[usize]) -> TensorValue {
    TensorValue::Real(RealTensor::from_raw(shape.to_vec(), data))
}

fn complex_value(data: Vec<Complex64>, shape: &[usize]) -> TensorValue {
    TensorValue::Complex(ComplexTensor::from_raw(shape.to_vec(), data))
}

fn zip_same(
    a: &TensorValue,
    b: &TensorValue,
    shape: &[usize],
    f_re: impl Fn(f64, f64) -> f64,
    f_im: impl Fn(Complex64, Complex64) -> Complex64,
) -> TensorValue {
    match (a, b) {
        (TensorValue::Real(x), TensorValue::Real(y)) => real_value(
            x.data()
                .iter()
                .zip(y.data().iter())
                .map(|(&p, &q)| f_re(p, q))
                .collect(),
            shape,
        ),
        (TensorValue::Complex(x), TensorValue::Complex(y)) => complex_value(
            x.data()
                .iter()
                .zip(y.data().iter())
                .map(|(&p, &q)| f_im(p, q))
                .collect(),
            shape,
        ),
        _ => unreachable!("kind checked at construction"),
    }
}

fn map_value(
    a: &TensorValue,
    shape: &[usize],
    f_re: impl Fn(f64) -> f64,
    f_im: impl Fn(Complex64) -> Complex64,
) -> TensorValue {
    match a {
        TensorValue::Real(x) => real_value(x.data().iter().map(|&p| f_re(p)).collect(), shape),
        TensorValue::Complex(x) => {
            complex_value(x.data().iter().map(|&p| f_im(p)).collect(), shape)
        }
    }
}

fn reduce_value(a: &TensorValue, shape: &[usize], scale: f64) -> TensorValue {
    match a {
        TensorValue::Real(x) => real_value(vec![x.data().iter().sum::<f64>() * scale], shape),
        TensorValue::Complex(x) => {
            complex_value(vec![x.data().iter().sum::<Complex64>() * scale], shape)
        }
    }
}

fn non_finite(value: &TensorValue) -> bool {
    match value {
        TensorValue::Real(t) => t.data().iter().any(|v| !v.is_finite()),
        TensorValue::Complex(t) => t
            .data()
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite()),
    }
}

fn op_name(op: &Op) -> &'static str {
    match op {
        Op::LeafReal { .. } => "leaf",
        Op::LeafComplex { .. } => "leaf",
        Op::ConstReal(_) | Op::ConstComplex(_) => "const",
        Op::Add(..) => "add",
        Op::Sub(..) => "sub",
        Op::Mul(..) => "mul",
        Op::Scale(..) => "scale",
        Op::MatVec { .. } => "matvec",
        Op::MixChannels { .. } => "mix_channels",
        Op::Conv1d { .. } => "conv1d",
        Op::Relu(_) => "relu",
        Op::Sum(_) => "sum",
        Op::Mean(_) => "mean",
        Op::Sin(_) => "sin",
        Op::Cos(_) => "cos",
        Op::Exp(_) => "exp",
        Op::Concat(_) => "concat",
        Op::Select { .. } => "select",
        Op::Slice { .. } => "slice",
        Op::RealPart(_) => "real_part",
        Op::ImagPart(_) => "imag_part",
        Op::ComplexJoin { .. } => "complex_join",
        Op::Conj(_) => "conj",
        Op::InverseDft(_) => "inverse_dft",
    }
}

fn accumulate_real(adjoints: &mut [Adjoint], target: super::NodeId, d: &[f64], factor: f64) {
    let dst = adjoints[target.0].real_mut();
    for (o, &v) in dst.iter_mut().zip(d.iter()) {
        *o += factor * v;
    }
}

fn accumulate_complex(
    adjoints: &mut [Adjoint],
    target: super::NodeId,
    a_out: &[Complex64],
    b_out: &[Complex64],
    factor: Complex64,
) {
    let (wa, wb) = adjoints[target.0].complex_mut();
    for i in 0..a_out.len() {
        wa[i] += a_out[i] * factor;
        wb[i] += b_out[i] * factor.conj();
    }
}

/// Chain rule through a holomorphic elementwise map with derivative `h'`:
/// `dg/dz += a * h'(z)`, `dg/d(conj z) += b * conj(h'(z))`.
fn holomorphic_chain(
    adjoints: &mut [Adjoint],
    target: super::NodeId,
    a_out: &[Complex64],
    b_out: &[Complex64],
    deriv: impl Fn(usize) -> Complex64,
) {
    let (wa, wb) = adjoints[target.0].complex_mut();
    for i in 0..a_out.len() {
        let d = deriv(i);
        wa[i] += a_out[i] * d;
        wb[i] += b_out[i] * d.conj();
    }
}
