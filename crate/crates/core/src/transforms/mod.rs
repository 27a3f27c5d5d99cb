//! Invertible, differentiable maps between the time domain and explanation
//! target domains.
//!
//! Every kind satisfies `inverse(forward(x)) = x` to machine precision:
//! identity trivially, the unitary DFT because the real-part projection is
//! lossless on spectra of real signals, fitted linear maps because both the
//! unmixing matrix and its exact inverse are stored, and the seasonal-trend
//! split because its inverse is the component sum.

mod dft;
mod linear;
mod stl;

pub use dft::{
    bin_labels, conjugate_pair_groups, dft_forward, dft_inverse, fold_conjugate_pairs,
    inverse_imag_magnitude,
};
pub use linear::{
    amari_index, fit_fastica, fit_fastica_init, linear_forward, linear_inverse, FitMeta,
};
pub use stl::{stl_decompose, stl_inverse};

use crate::autodiff::{GraphBuilder, NodeId};
use crate::matrix::DenseMatrix;
use crate::tensor::{RealTensor, TensorValue};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("input shape {got:?} does not fit transform ({expected})")]
    ShapeMismatch { got: Vec<usize>, expected: String },
    #[error("unmixing matrix is singular")]
    SingularMatrix,
    #[error("matrix pair is not an inverse pair (max |W*A - I| = {residual:e})")]
    NotInversePair { residual: f64 },
    #[error("covariance is rank deficient (eigenvalue {value:e} below cutoff)")]
    RankDeficient { value: f64 },
    #[error("period {period} out of range for length {n} (need 2 <= period <= n/2)")]
    PeriodOutOfRange { period: usize, n: usize },
    #[error("n_components {requested} must equal channel count {channels}")]
    ComponentCount { requested: usize, channels: usize },
    #[error("need more samples than channels to fit (got {channels}x{samples})")]
    TooFewSamples { channels: usize, samples: usize },
    #[error(transparent)]
    Matrix(#[from] crate::matrix::MatrixError),
    #[error(transparent)]
    Tensor(#[from] crate::tensor::TensorError),
}

/// Which explanation domain a representation lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Identity,
    Dft,
    Linear,
    SeasonalTrend,
}

impl DomainKind {
    pub fn is_complex(&self) -> bool {
        matches!(self, DomainKind::Dft)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DomainKind::Identity => "identity",
            DomainKind::Dft => "dft",
            DomainKind::Linear => "linear",
            DomainKind::SeasonalTrend => "seasonal_trend",
        }
    }
}

/// A point in the target domain, with labels for each feature.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetRepresentation {
    pub domain: DomainKind,
    pub values: TensorValue,
    pub labels: Vec<String>,
}

impl TargetRepresentation {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// An invertible differentiable transform between time and target domains.
///
/// Serializes as a single JSON document tagged by `kind`. Documents from
/// outside this process should be [`TransformSpec::validate`]d after
/// deserialization; the constructors used here enforce the invariants up
/// front.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformSpec {
    Identity {
        n: usize,
    },
    Dft {
        n: usize,
        /// Sampling rate in Hz; only used for bin labels.
        fs: f64,
    },
    Linear {
        /// Channel count (square case: components == channels).
        n: usize,
        /// Unmixing matrix: `s = W x` per time step.
        w: DenseMatrix,
        /// Mixing matrix, the exact inverse of `w`.
        a: DenseMatrix,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fit: Option<FitMeta>,
    },
    SeasonalTrend {
        n: usize,
        period: usize,
    },
}

impl TransformSpec {
    pub fn identity(n: usize) -> Self {
        TransformSpec::Identity { n }
    }

    pub fn dft(n: usize, fs: f64) -> Self {
        TransformSpec::Dft { n, fs }
    }

    /// Builds a linear transform from an unmixing matrix, computing the
    /// exact inverse. Fails on singular input.
    pub fn linear(w: DenseMatrix) -> Result<Self, TransformError> {
        let inv = w
            .to_nalgebra()
            .try_inverse()
            .ok_or(TransformError::SingularMatrix)?;
        let a = DenseMatrix::from_nalgebra(&inv);
        Self::linear_pair(w, a, None, None)
    }

    /// Builds a linear transform from an explicit (W, A) pair; checks that
    /// they actually invert each other.
    pub fn linear_pair(
        w: DenseMatrix,
        a: DenseMatrix,
        seed: Option<u64>,
        fit: Option<FitMeta>,
    ) -> Result<Self, TransformError> {
        if w.rows() != w.cols() || a.rows() != a.cols() || w.rows() != a.rows() {
            return Err(TransformError::ShapeMismatch {
                got: vec![w.rows(), w.cols(), a.rows(), a.cols()],
                expected: "square W and A of equal size".into(),
            });
        }
        let residual = w.inverse_residual(&a);
        if residual > 1e-8 {
            return Err(TransformError::NotInversePair { residual });
        }
        Ok(TransformSpec::Linear {
            n: w.rows(),
            w,
            a,
            seed,
            fit,
        })
    }

    pub fn seasonal_trend(n: usize, period: usize) -> Result<Self, TransformError> {
        stl::check_period(n, period)?;
        Ok(TransformSpec::SeasonalTrend { n, period })
    }

    pub fn kind(&self) -> DomainKind {
        match self {
            TransformSpec::Identity { .. } => DomainKind::Identity,
            TransformSpec::Dft { .. } => DomainKind::Dft,
            TransformSpec::Linear { .. } => DomainKind::Linear,
            TransformSpec::SeasonalTrend { .. } => DomainKind::SeasonalTrend,
        }
    }

    /// Re-checks construction invariants; call after deserializing.
    pub fn validate(&self) -> Result<(), TransformError> {
        match self {
            TransformSpec::Identity { .. } | TransformSpec::Dft { .. } => Ok(()),
            TransformSpec::Linear { n, w, a, .. } => {
                if w.rows() != *n || w.cols() != *n || a.rows() != *n || a.cols() != *n {
                    return Err(TransformError::ShapeMismatch {
                        got: vec![w.rows(), w.cols(), a.rows(), a.cols()],
                        expected: format!("{n}x{n} W and A"),
                    });
                }
                let residual = w.inverse_residual(a);
                if residual > 1e-8 {
                    return Err(TransformError::NotInversePair { residual });
                }
                Ok(())
            }
            TransformSpec::SeasonalTrend { n, period } => stl::check_period(*n, *period),
        }
    }

    /// Maps a time-domain signal into the target domain.
    pub fn forward(&self, x: &RealTensor) -> Result<TargetRepresentation, TransformError> {
        match self {
            TransformSpec::Identity { n } => {
                expect_vector(x, *n)?;
                Ok(TargetRepresentation {
                    domain: DomainKind::Identity,
                    values: TensorValue::Real(x.clone()),
                    labels: (0..*n).map(|t| format!("t{t}")).collect(),
                })
            }
            TransformSpec::Dft { n, fs } => {
                expect_vector(x, *n)?;
                Ok(dft::dft_forward(x.data(), *fs))
            }
            TransformSpec::Linear { w, .. } => linear::linear_forward(x, w),
            TransformSpec::SeasonalTrend { n, period } => {
                expect_vector(x, *n)?;
                stl::stl_decompose(x.data(), *period)
            }
        }
    }

    /// Maps target-domain values back to the time domain. Total on the whole
    /// target space; for the DFT kind the real-part projection extends the
    /// inverse off the Hermitian subspace.
    pub fn inverse(&self, values: &TensorValue) -> Result<RealTensor, TransformError> {
        match self {
            TransformSpec::Identity { n } => {
                let t = values
                    .as_real()
                    .ok_or_else(|| TransformError::ShapeMismatch {
                        got: values.shape().to_vec(),
                        expected: "real values".into(),
                    })?;
                expect_vector(t, *n)?;
                Ok(t.clone())
            }
            TransformSpec::Dft { n, .. } => {
                let t = values
                    .as_complex()
                    .ok_or_else(|| TransformError::ShapeMismatch {
                        got: values.shape().to_vec(),
                        expected: "complex values".into(),
                    })?;
                if t.len() != *n {
                    return Err(TransformError::ShapeMismatch {
                        got: t.shape().to_vec(),
                        expected: format!("length {n}"),
                    });
                }
                Ok(dft::dft_inverse(t.data()))
            }
            TransformSpec::Linear { a, .. } => {
                let t = values
                    .as_real()
                    .ok_or_else(|| TransformError::ShapeMismatch {
                        got: values.shape().to_vec(),
                        expected: "real values".into(),
                    })?;
                linear::linear_inverse(t, a)
            }
            TransformSpec::SeasonalTrend { n, .. } => {
                let t = values
                    .as_real()
                    .ok_or_else(|| TransformError::ShapeMismatch {
                        got: values.shape().to_vec(),
                        expected: "real values".into(),
                    })?;
                if t.shape() != [3, *n] {
                    return Err(TransformError::ShapeMismatch {
                        got: t.shape().to_vec(),
                        expected: format!("[3, {n}]"),
                    });
                }
                Ok(stl::stl_inverse(t))
            }
        }
    }

    /// Feature labels of the target domain for a given input shape.
    pub fn labels(&self, x_shape: &[usize]) -> Vec<String> {
        match self {
            TransformSpec::Identity { n } => (0..*n).map(|t| format!("t{t}")).collect(),
            TransformSpec::Dft { n, fs } => dft::bin_labels(*n, *fs),
            TransformSpec::Linear { n, .. } => {
                let m = if x_shape.len() == 2 { x_shape[1] } else { 1 };
                let mut labels = Vec::with_capacity(n * m);
                for c in 0..*n {
                    for _ in 0..m {
                        labels.push(format!("c{c}"));
                    }
                }
                labels
            }
            TransformSpec::SeasonalTrend { n, .. } => {
                let mut labels = Vec::with_capacity(3 * n);
                for name in ["trend", "seasonal", "residual"] {
                    labels.extend(std::iter::repeat_n(name.to_string(), *n));
                }
                labels
            }
        }
    }

    /// Shape of the target-domain value tensor for a given input shape.
    pub fn target_shape(&self, x_shape: &[usize]) -> Vec<usize> {
        match self {
            TransformSpec::Identity { n } | TransformSpec::Dft { n, .. } => vec![*n],
            TransformSpec::Linear { n, .. } => {
                let m = if x_shape.len() == 2 { x_shape[1] } else { 1 };
                vec![*n, m]
            }
            TransformSpec::SeasonalTrend { n, .. } => vec![3, *n],
        }
    }

    /// Appends the inverse map to a graph under construction: creates the
    /// target-domain leaf and returns `(leaf, time_domain_node)`.
    pub fn build_inverse(
        &self,
        b: &mut GraphBuilder,
        x_shape: &[usize],
    ) -> Result<(NodeId, NodeId), TransformError> {
        match self {
            TransformSpec::Identity { n } => {
                check_shape(x_shape, &[*n])?;
                let leaf = b.real_leaf(vec![*n]);
                Ok((leaf, leaf))
            }
            TransformSpec::Dft { n, .. } => {
                check_shape(x_shape, &[*n])?;
                let leaf = b.complex_leaf(vec![*n]);
                let idft = b.inverse_dft(leaf).expect("complex leaf");
                let x = b.real_part(idft).expect("complex idft");
                Ok((leaf, x))
            }
            TransformSpec::Linear { n, a, .. } => {
                if x_shape.len() != 2 || x_shape[0] != *n {
                    return Err(TransformError::ShapeMismatch {
                        got: x_shape.to_vec(),
                        expected: format!("[{n}, len]"),
                    });
                }
                let leaf = b.real_leaf(x_shape.to_vec());
                let x = b.mix_channels(a.clone(), leaf).expect("square mix");
                Ok((leaf, x))
            }
            TransformSpec::SeasonalTrend { n, .. } => {
                check_shape(x_shape, &[*n])?;
                let leaf = b.real_leaf(vec![3, *n]);
                let trend = b.slice(leaf, 0, *n).expect("in range");
                let seasonal = b.slice(leaf, *n, *n).expect("in range");
                let residual = b.slice(leaf, 2 * *n, *n).expect("in range");
                let ts = b.add(trend, seasonal).expect("same shape");
                let x = b.add(ts, residual).expect("same shape");
                Ok((leaf, x))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn expect_vector(x: &RealTensor, n: usize) -> Result<(), TransformError> {
    if x.shape() != [n] {
        return Err(TransformError::ShapeMismatch {
            got: x.shape().to_vec(),
            expected: format!("length-{n} vector"),
        });
    }
    Ok(())
}

fn check_shape(got: &[usize], expected: &[usize]) -> Result<(), TransformError> {
    if got != expected {
        return Err(TransformError::ShapeMismatch {
            got: got.to_vec(),
            expected: format!("{expected:?}"),
        });
    }
    Ok(())
}
