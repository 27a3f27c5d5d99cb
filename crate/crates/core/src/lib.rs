//! Feature attributions for time-series models in invertible transform
//! domains.
//!
//! The pipeline: a differentiable scalar model over a time window, an
//! invertible transform into an explanation domain (frequency bins via the
//! unitary DFT, independent components via a fitted linear map, or an
//! additive seasonal-trend split), and a path-integral attribution engine
//! that scores each target-domain feature, with completeness auditing and
//! insertion/deletion faithfulness protocols on top.
//!
//! Entry points:
//! - [`autodiff`]: reverse-mode engine over real and complex tensors, with
//!   Wirtinger derivatives for complex leaves.
//! - [`transforms`]: invertible maps between time and target domains,
//!   including FastICA fitting.
//! - [`attribution`]: the path-integral attribution algorithms and the
//!   spectral redistribution cross-check.
//! - [`models`]: small analytically tractable convolutional models and
//!   their JSON file format.
//! - [`eval`]: synthetic corpora, the insertion/deletion protocol, and the
//!   frequency-response probe.
//!
//! Explaining a frequency-selective classifier in the frequency domain:
//!
//! ```
//! use xdig::{attribute, Algorithm, ModelSpec, PathSpec, Rule, TransformSpec};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let model = ModelSpec::sinusoid_classifier_default();
//! let graph = model.with_output(0).compile()?;
//! let transform = TransformSpec::dft(model.n, model.fs);
//!
//! let (x, _label) = xdig::eval::generate_two_class(
//!     &xdig::DatasetSpec::two_class_default(7), 1).remove(0);
//! let path = PathSpec::zero_baseline(&transform, &[model.n], 256, Rule::RightRiemann)?;
//! let result = attribute(&graph, &transform, &x, &path, Algorithm::ComplexWirtinger)?;
//!
//! // scores sum to f(x) - f(0) up to the recorded residual
//! assert!(result.completeness_residual.abs() < 1e-6);
//! let strongest = result
//!     .scores
//!     .iter()
//!     .enumerate()
//!     .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
//!     .unwrap();
//! assert!(result.labels[strongest.0].ends_with("Hz"));
//! # Ok(())
//! # }
//! ```

pub mod attribution;
pub mod autodiff;
pub mod eval;
pub mod fourier;
pub mod matrix;
pub mod models;
pub mod rng;
pub mod tensor;
pub mod transforms;

pub use attribution::{
    attribute, baseline_filtered, baseline_zero, ig_complex_split, ig_complex_wirtinger,
    ig_real_domain, virtual_inspection_check, Algorithm, AttributionError, AttributionResult,
    PathKind, PathSpec, Rule,
};
pub use autodiff::{
    backward, finite_difference_check, forward_eval, Bindings, ComputeGraph, GradientSet,
    GraphBuilder, GraphError, ValueKind,
};
pub use eval::{
    run_curve, CurveConfig, DatasetSpec, EvalError, InterventionMode, InterventionReport,
};
pub use matrix::DenseMatrix;
pub use models::{ModelError, ModelSpec};
pub use tensor::{ComplexTensor, RealTensor, TensorValue};
pub use transforms::{DomainKind, TargetRepresentation, TransformError, TransformSpec};

/// Re-exported complex scalar type used throughout the public API.
pub use num_complex::Complex64;
