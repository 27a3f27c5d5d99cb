//! Shared fixtures for the criterion benchmarks.

use xdig::eval::{generate_two_class, DatasetSpec};
use xdig::{ModelSpec, RealTensor};

pub fn classifier() -> ModelSpec {
    ModelSpec::sinusoid_classifier_default()
}

/// One deterministic class-1 sample at the reference configuration.
pub fn sample() -> RealTensor {
    generate_two_class(&DatasetSpec::two_class_default(7), 1)
        .remove(0)
        .0
}
