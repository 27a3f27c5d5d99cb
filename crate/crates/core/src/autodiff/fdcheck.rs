//! Central-difference gradient check.

use super::{eval, Bindings, ComputeGraph, GraphError, LeafGradient, ValueKind};
use crate::tensor::{ComplexTensor, RealTensor, TensorValue};
use num_complex::Complex64;

/// Compares reverse-mode gradients against central differences at every leaf
/// coordinate (real and imaginary parts checked independently for complex
/// leaves) and returns the worst relative error.
///
/// Relative error is `|fd - ad| / max(1, |fd|, |ad|)`, so coordinates with
/// tiny gradients are compared absolutely.
pub fn finite_difference_check(
    graph: &ComputeGraph,
    bindings: &Bindings,
    eps: f64,
) -> Result<f64, GraphError> {
    assert!(eps > 0.0, "eps must be positive");
    let (_, grads) = eval::backward(graph, bindings)?;
    let mut worst: f64 = 0.0;

    for slot in 0..graph.leaf_count() {
        match graph.leaf_kind(slot) {
            ValueKind::Real => {
                let base = bindings
                    .get(slot)
                    .and_then(TensorValue::as_real)
                    .expect("bound checked by backward")
                    .clone();
                let analytic = match &grads.leaves[slot] {
                    LeafGradient::Real(g) => g.clone(),
                    _ => unreachable!(),
                };
                for (i, &ad) in analytic.iter().enumerate() {
                    let fd = central_real(graph, bindings, slot, &base, i, eps)?;
                    worst = worst.max(rel_err(fd, ad));
                }
            }
            ValueKind::Complex => {
                let base = bindings
                    .get(slot)
                    .and_then(TensorValue::as_complex)
                    .expect("bound checked by backward")
                    .clone();
                let (d_re, d_im) = grads.real_imag_pair(slot);
                let (d_re, d_im) = (d_re.to_vec(), d_im.to_vec());
                for i in 0..base.len() {
                    let fd_p = central_complex(graph, bindings, slot, &base, i, eps, false)?;
                    let fd_q = central_complex(graph, bindings, slot, &base, i, eps, true)?;
                    worst = worst.max(rel_err(fd_p, d_re[i]));
                    worst = worst.max(rel_err(fd_q, d_im[i]));
                }
            }
        }
    }
    Ok(worst)
}

fn rel_err(fd: f64, ad: f64) -> f64 {
    (fd - ad).abs() / fd.abs().max(ad.abs()).max(1.0)
}

fn central_real(
    graph: &ComputeGraph,
    bindings: &Bindings,
    slot: usize,
    base: &RealTensor,
    index: usize,
    eps: f64,
) -> Result<f64, GraphError> {
    let eval_at = |delta: f64| -> Result<f64, GraphError> {
        let mut data = base.data().to_vec();
        data[index] += delta;
        let mut b = bindings.clone();
        b.set(slot, RealTensor::new(base.shape().to_vec(), data)?);
        eval::forward_eval(graph, &b)
    };
    Ok((eval_at(eps)? - eval_at(-eps)?) / (2.0 * eps))
}

fn central_complex(
    graph: &ComputeGraph,
    bindings: &Bindings,
    slot: usize,
    base: &ComplexTensor,
    index: usize,
    eps: f64,
    imaginary: bool,
) -> Result<f64, GraphError> {
    let eval_at = |delta: f64| -> Result<f64, GraphError> {
        let mut data = base.data().to_vec();
        data[index] += if imaginary {
            Complex64::new(0.0, delta)
        } else {
            Complex64::new(delta, 0.0)
        };
        let mut b = bindings.clone();
        b.set(slot, ComplexTensor::new(base.shape().to_vec(), data)?);
        eval::forward_eval(graph, &b)
    };
    Ok((eval_at(eps)? - eval_at(-eps)?) / (2.0 * eps))
}
