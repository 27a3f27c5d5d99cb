//! Frequency probe: attribution mass versus filter response.
//!
//! Drives one channel of a conv model with unit cosines at every positive
//! bin frequency, attributes each probe in the spectral domain, and pairs
//! the summed conjugate-pair mass at the probe bin with the channel
//! kernel's frequency response there. For the conv/ReLU/pool architecture
//! both curves trace `a * b(xi) / pi` up to edge effects, so their Pearson
//! correlation sits near 1.

use super::EvalError;
use crate::attribution::{ig_complex_wirtinger, PathSpec, Rule};
use crate::models::{frequency_response, Layer, ModelSpec};
use crate::tensor::RealTensor;
use crate::transforms::TransformSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub xi_hz: f64,
    /// Kernel gain `b(xi)` of the probed channel.
    pub response: f64,
    /// Summed attribution of the conjugate bin pair at `xi`, averaged over
    /// the probe phases.
    pub ig_mass: f64,
}

/// Probes `channel` of `model` at bins `1..=n/2` with `phases` equispaced
/// probe phases per frequency.
///
/// The phase average matters: `a b / pi` is the phase-averaged pooled
/// output, and at high frequencies (few samples per period) a single
/// sampled cosine's ReLU mean swings with its phase alignment. Eight phases
/// flatten that sampling wobble.
pub fn frequency_ig_sweep(
    model: &ModelSpec,
    channel: usize,
    n_steps: usize,
    phases: usize,
) -> Result<Vec<SweepPoint>, EvalError> {
    let Some(Layer::Conv1d { kernels }) = model.layers.first() else {
        return Err(EvalError::NotConvModel);
    };
    let kernel = kernels.get(channel).ok_or(EvalError::NotConvModel)?.clone();
    assert!(phases > 0, "need at least one probe phase");
    let (n, fs) = (model.n, model.fs);
    let graph = model.with_output(channel).compile()?;
    let transform = TransformSpec::dft(n, fs);

    (1..=n / 2)
        .map(|k| {
            let xi = k as f64 * fs / n as f64;
            let mut mass_total = 0.0;
            for p in 0..phases {
                let phi = std::f64::consts::TAU * p as f64 / phases as f64;
                let data: Vec<f64> = (0..n)
                    .map(|m| (std::f64::consts::TAU * xi * m as f64 / fs + phi).cos())
                    .collect();
                let x = RealTensor::vector(&data).expect("finite");
                let path = PathSpec::zero_baseline(&transform, &[n], n_steps, Rule::RightRiemann)?;
                let result = ig_complex_wirtinger(&graph, &transform, &x, &path)?;
                mass_total += if 2 * k == n {
                    result.scores[k]
                } else {
                    result.scores[k] + result.scores[n - k]
                };
            }
            Ok(SweepPoint {
                xi_hz: xi,
                response: frequency_response(&kernel, xi, fs),
                ig_mass: mass_total / phases as f64,
            })
        })
        .collect()
}

/// Pearson correlation coefficient.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va.sqrt() * vb.sqrt())
}
