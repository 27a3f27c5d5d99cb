//! Dense row-major tensors over `f64` and `Complex64`.
//!
//! These are the value types flowing through compute graphs and transforms.
//! Constructors reject non-finite entries and shape/length mismatches so that
//! downstream numerics only ever see well-formed data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by tensor constructors.
#[derive(Debug, Error)]
pub enum TensorError {
    #[error("data length {len} does not match shape {shape:?} (expected {expected})")]
    LengthMismatch {
        shape: Vec<usize>,
        len: usize,
        expected: usize,
    },
    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },
}

fn shape_len(shape: &[usize]) -> usize {
    shape.iter().product()
}

/// Real-valued tensor, 64-bit floats in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl RealTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, TensorError> {
        let expected = shape_len(&shape);
        if data.len() != expected {
            return Err(TensorError::LengthMismatch {
                shape,
                len: data.len(),
                expected,
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(TensorError::NonFinite { index });
        }
        Ok(Self { shape, data })
    }

    /// 1-D tensor from a slice.
    pub fn vector(data: &[f64]) -> Result<Self, TensorError> {
        Self::new(vec![data.len()], data.to_vec())
    }

    /// Skips the finite check; used by graph evaluation, which scans every
    /// intermediate itself so it can report the offending node index.
    pub(crate) fn from_raw(shape: Vec<usize>, data: Vec<f64>) -> Self {
        debug_assert_eq!(shape_len(&shape), data.len());
        Self { shape, data }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape_len(&shape);
        Self {
            shape,
            data: vec![0.0; len],
        }
    }

    pub fn scalar(value: f64) -> Result<Self, TensorError> {
        Self::new(vec![1], vec![value])
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }
}

/// Complex-valued tensor, pairs of 64-bit floats in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensor {
    shape: Vec<usize>,
    data: Vec<Complex64>,
}

impl ComplexTensor {
    pub fn new(shape: Vec<usize>, data: Vec<Complex64>) -> Result<Self, TensorError> {
        let expected = shape_len(&shape);
        if data.len() != expected {
            return Err(TensorError::LengthMismatch {
                shape,
                len: data.len(),
                expected,
            });
        }
        if let Some(index) = data
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(TensorError::NonFinite { index });
        }
        Ok(Self { shape, data })
    }

    pub fn vector(data: &[Complex64]) -> Result<Self, TensorError> {
        Self::new(vec![data.len()], data.to_vec())
    }

    pub(crate) fn from_raw(shape: Vec<usize>, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(shape_len(&shape), data.len());
        Self { shape, data }
    }

    /// Builds a complex tensor from separate real and imaginary parts.
    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self, TensorError> {
        assert_eq!(re.len(), im.len(), "real/imag parts differ in length");
        let data: Vec<Complex64> = re
            .iter()
            .zip(im.iter())
            .map(|(&p, &q)| Complex64::new(p, q))
            .collect();
        Self::new(vec![data.len()], data)
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape_len(&shape);
        Self {
            shape,
            data: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }
}

/// Either kind of tensor; the binding type for graph leaves.
#[derive(Debug, Clone, PartialEq)]
pub enum TensorValue {
    Real(RealTensor),
    Complex(ComplexTensor),
}

impl TensorValue {
    pub fn shape(&self) -> &[usize] {
        match self {
            TensorValue::Real(t) => t.shape(),
            TensorValue::Complex(t) => t.shape(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TensorValue::Real(t) => t.len(),
            TensorValue::Complex(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_real(&self) -> Option<&RealTensor> {
        match self {
            TensorValue::Real(t) => Some(t),
            TensorValue::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&ComplexTensor> {
        match self {
            TensorValue::Complex(t) => Some(t),
            TensorValue::Real(_) => None,
        }
    }
}

impl From<RealTensor> for TensorValue {
    fn from(t: RealTensor) -> Self {
        TensorValue::Real(t)
    }
}

impl From<ComplexTensor> for TensorValue {
    fn from(t: ComplexTensor) -> Self {
        TensorValue::Complex(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_length_mismatch() {
        let err = RealTensor::new(vec![2, 3], vec![1.0; 5]).unwrap_err();
        assert!(matches!(
            err,
            TensorError::LengthMismatch { expected: 6, .. }
        ));
    }

    #[test]
    fn rejects_non_finite() {
        let err = RealTensor::vector(&[1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, TensorError::NonFinite { index: 1 }));
        let err = ComplexTensor::vector(&[Complex64::new(0.0, f64::INFINITY)]).unwrap_err();
        assert!(matches!(err, TensorError::NonFinite { index: 0 }));
    }

    #[test]
    fn from_parts_pairs_up() {
        let z = ComplexTensor::from_parts(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(z.data()[1], Complex64::new(2.0, 4.0));
    }
}
