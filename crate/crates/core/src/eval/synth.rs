//! Seeded signal generators.

use super::EvalError;
use crate::rng::XorShift64Star;
use crate::tensor::RealTensor;
use serde::{Deserialize, Serialize};

/// Generator parameters; a spec plus a seed fully determines the corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    /// `x(t) = cos(2 pi xi t + phi)` with `xi` drawn per class and `phi`
    /// uniform in [0, 2 pi). Labels alternate 0, 1, 0, 1, ...
    TwoClassSinusoid {
        fs: f64,
        n: usize,
        class_means_hz: [f64; 2],
        class_stds_hz: [f64; 2],
        seed: u64,
    },
    /// Exponential trend plus a two-harmonic seasonal component;
    /// `alpha` and `xi` drawn uniformly from the given ranges.
    TrendSeasonal {
        fs: f64,
        n: usize,
        horizon: usize,
        alpha_range: [f64; 2],
        xi_range_hz: [f64; 2],
        seed: u64,
    },
}

impl DatasetSpec {
    /// Two sinusoid classes centered at 1 Hz and 4 Hz (std 0.5 Hz each),
    /// 4 s windows at 32 Hz.
    pub fn two_class_default(seed: u64) -> Self {
        DatasetSpec::TwoClassSinusoid {
            fs: crate::models::SINUSOID_FS,
            n: crate::models::SINUSOID_N,
            class_means_hz: [1.0, 4.0],
            class_stds_hz: [0.5, 0.5],
            seed,
        }
    }

    /// 512-point windows at 64 Hz with a 128-point horizon;
    /// `alpha ~ U(4, 7)`, `xi ~ U(3, 8)` Hz.
    pub fn trend_seasonal_default(seed: u64) -> Self {
        DatasetSpec::TrendSeasonal {
            fs: 64.0,
            n: 512,
            horizon: 128,
            alpha_range: [4.0, 7.0],
            xi_range_hz: [3.0, 8.0],
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            DatasetSpec::TwoClassSinusoid { seed, .. } => *seed,
            DatasetSpec::TrendSeasonal { seed, .. } => *seed,
        }
    }

    pub fn fs(&self) -> f64 {
        match self {
            DatasetSpec::TwoClassSinusoid { fs, .. } => *fs,
            DatasetSpec::TrendSeasonal { fs, .. } => *fs,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            DatasetSpec::TwoClassSinusoid { n, .. } => *n,
            DatasetSpec::TrendSeasonal { n, .. } => *n,
        }
    }
}

/// Samples one sinusoid class: `xi` is redrawn until it lands strictly
/// inside (0.1, fs/2), since the nominal Gaussian has mass at unusable
/// frequencies.
fn draw_frequency(rng: &mut XorShift64Star, mean: f64, std: f64, fs: f64) -> f64 {
    loop {
        let xi = rng.normal(mean, std);
        if xi > 0.1 && xi < fs / 2.0 {
            return xi;
        }
    }
}

/// Deterministic two-class corpus; sample `i` draws from the substream
/// `(seed, i)`, so any prefix of the corpus is stable.
pub fn generate_two_class(spec: &DatasetSpec, count: usize) -> Vec<(RealTensor, usize)> {
    let DatasetSpec::TwoClassSinusoid {
        fs,
        n,
        class_means_hz,
        class_stds_hz,
        seed,
    } = spec
    else {
        panic!("generate_two_class needs a two_class_sinusoid spec");
    };
    (0..count)
        .map(|i| {
            let label = i % 2;
            let mut rng = XorShift64Star::substream(*seed, i as u64);
            let xi = draw_frequency(&mut rng, class_means_hz[label], class_stds_hz[label], *fs);
            let phi = rng.uniform(0.0, std::f64::consts::TAU);
            let data: Vec<f64> = (0..*n)
                .map(|m| (std::f64::consts::TAU * xi * m as f64 / fs + phi).cos())
                .collect();
            (RealTensor::vector(&data).expect("finite"), label)
        })
        .collect()
}

/// `x(t) = e^{t/alpha} + sin(2 pi xi t + phi) + sin(2 pi 2 xi t + phi)`,
/// sampled at `fs` for `n + horizon` points starting at t = 0.
pub fn generate_trend_seasonal(
    alpha: f64,
    xi_hz: f64,
    phi: f64,
    fs: f64,
    n: usize,
    horizon: usize,
) -> Result<RealTensor, EvalError> {
    assert!(alpha > 0.0, "alpha must be positive");
    let total = n + horizon;
    let t_max = (total.saturating_sub(1)) as f64 / fs;
    if t_max / alpha > 700.0 {
        return Err(EvalError::TrendOverflow {
            value: t_max / alpha,
        });
    }
    let data: Vec<f64> = (0..total)
        .map(|m| {
            let t = m as f64 / fs;
            let trend = (t / alpha).exp();
            let seasonal = (std::f64::consts::TAU * xi_hz * t + phi).sin()
                + (std::f64::consts::TAU * 2.0 * xi_hz * t + phi).sin();
            trend + seasonal
        })
        .collect();
    Ok(RealTensor::vector(&data).expect("finite"))
}

/// Corpus generation dispatch; trend/seasonal datasets carry label 0.
pub fn generate_dataset(
    spec: &DatasetSpec,
    count: usize,
) -> Result<Vec<(RealTensor, usize)>, EvalError> {
    match spec {
        DatasetSpec::TwoClassSinusoid { .. } => Ok(generate_two_class(spec, count)),
        DatasetSpec::TrendSeasonal {
            fs,
            n,
            horizon,
            alpha_range,
            xi_range_hz,
            seed,
        } => (0..count)
            .map(|i| {
                let mut rng = XorShift64Star::substream(*seed, i as u64);
                let alpha = rng.uniform(alpha_range[0], alpha_range[1]);
                let xi = rng.uniform(xi_range_hz[0], xi_range_hz[1]);
                let phi = rng.uniform(0.0, std::f64::consts::TAU);
                generate_trend_seasonal(alpha, xi, phi, *fs, *n, *horizon).map(|x| (x, 0))
            })
            .collect(),
    }
}
