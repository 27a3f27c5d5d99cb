//! Additive seasonal-trend decomposition.
//!
//! For a fixed `(n, period)` this is a fixed linear operator:
//!
//! - trend: centered moving average of width `period` (width `period + 1`
//!   with half end-weights when `period` is even), edges mirrored;
//! - seasonal: period-phase means of the detrended series over the interior
//!   (windows that never touch a mirrored edge), re-centered to zero mean,
//!   tiled across the window;
//! - residual: whatever is left, so the component sum reconstructs the input
//!   by construction.

use super::{DomainKind, TargetRepresentation, TransformError};
use crate::tensor::{RealTensor, TensorValue};

pub fn check_period(n: usize, period: usize) -> Result<(), TransformError> {
    if period < 2 || n < 2 * period {
        return Err(TransformError::PeriodOutOfRange { period, n });
    }
    Ok(())
}

/// Mirror reflection about the end points: index -k maps to k, index
/// n-1+k maps to n-1-k.
fn mirrored(x: &[f64], idx: isize) -> f64 {
    let n = x.len() as isize;
    let mut i = idx;
    if i < 0 {
        i = -i;
    }
    if i >= n {
        i = 2 * (n - 1) - i;
    }
    x[i as usize]
}

fn trend_component(x: &[f64], period: usize) -> (Vec<f64>, usize) {
    let n = x.len();
    // odd-adjusted window: odd period -> uniform; even period -> one wider
    // with half weights at both ends (each phase then covered equally)
    let (half, weights): (usize, Vec<f64>) = if period % 2 == 1 {
        let h = period / 2;
        (h, vec![1.0 / period as f64; period])
    } else {
        let h = period / 2;
        let mut w = vec![1.0 / period as f64; period + 1];
        w[0] = 0.5 / period as f64;
        w[period] = 0.5 / period as f64;
        (h, w)
    };
    let mut trend = vec![0.0; n];
    for (i, out) in trend.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, &w) in weights.iter().enumerate() {
            acc += w * mirrored(x, i as isize + k as isize - half as isize);
        }
        *out = acc;
    }
    (trend, half)
}

/// Splits `x` into `[trend; seasonal; residual]`, shape `[3, n]`.
pub fn stl_decompose(x: &[f64], period: usize) -> Result<TargetRepresentation, TransformError> {
    let n = x.len();
    check_period(n, period)?;
    let (trend, half) = trend_component(x, period);

    let detrended: Vec<f64> = x.iter().zip(trend.iter()).map(|(a, b)| a - b).collect();

    // phase means over the interior only; mirrored edges never contaminate
    // the profile
    let lo = half;
    let hi = n - half;
    let mut profile = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for i in lo..hi {
        profile[i % period] += detrended[i];
        counts[i % period] += 1;
    }
    for (p, &c) in profile.iter_mut().zip(counts.iter()) {
        debug_assert!(c > 0, "n >= 2*period covers every phase");
        *p /= c as f64;
    }
    let profile_mean: f64 = profile.iter().sum::<f64>() / period as f64;
    for p in profile.iter_mut() {
        *p -= profile_mean;
    }

    let seasonal: Vec<f64> = (0..n).map(|i| profile[i % period]).collect();
    let residual: Vec<f64> = (0..n).map(|i| x[i] - trend[i] - seasonal[i]).collect();

    let mut data = Vec::with_capacity(3 * n);
    data.extend_from_slice(&trend);
    data.extend_from_slice(&seasonal);
    data.extend_from_slice(&residual);

    let mut labels = Vec::with_capacity(3 * n);
    for name in ["trend", "seasonal", "residual"] {
        labels.extend(std::iter::repeat_n(name.to_string(), n));
    }

    Ok(TargetRepresentation {
        domain: DomainKind::SeasonalTrend,
        values: TensorValue::Real(RealTensor::new(vec![3, n], data)?),
        labels,
    })
}

/// Component sum; exact inverse of [`stl_decompose`] by construction.
pub fn stl_inverse(components: &RealTensor) -> RealTensor {
    let n = components.shape()[1];
    let d = components.data();
    let data: Vec<f64> = (0..n).map(|i| d[i] + d[n + i] + d[2 * n + i]).collect();
    RealTensor::new(vec![n], data).expect("finite sum")
}
