//! Unitary DFT target domain.
//!
//! The full complex spectrum of length n is kept (not the one-sided half),
//! and the inverse projects onto the real part. On Hermitian spectra, which
//! is where transforms of real signals and every point of a linear path
//! between them live, the projection discards an exactly-zero imaginary part,
//! so the roundtrip is lossless; off the Hermitian subspace it is the
//! canonical smooth extension that makes the inverse total on C^n.

use super::{DomainKind, TargetRepresentation};
use crate::fourier;
use crate::tensor::{ComplexTensor, RealTensor, TensorValue};
use num_complex::Complex64;

pub fn bin_labels(n: usize, fs: f64) -> Vec<String> {
    (0..n)
        .map(|k| format!("{:.2}Hz", k as f64 * fs / n as f64))
        .collect()
}

/// `z_k = n^{-1/2} sum_m x_m exp(-2 pi j k m / n)`, bins labeled `k*fs/n`.
pub fn dft_forward(x: &[f64], fs: f64) -> TargetRepresentation {
    let spectrum = fourier::unitary_dft_real(x);
    let n = x.len();
    TargetRepresentation {
        domain: DomainKind::Dft,
        values: TensorValue::Complex(ComplexTensor::new(vec![n], spectrum).expect("finite dft")),
        labels: bin_labels(n, fs),
    }
}

/// `x_m = Re[n^{-1/2} sum_k z_k exp(+2 pi j k m / n)]`.
pub fn dft_inverse(z: &[Complex64]) -> RealTensor {
    let full = fourier::unitary_idft(z);
    let data: Vec<f64> = full.iter().map(|v| v.re).collect();
    RealTensor::new(vec![z.len()], data).expect("finite idft")
}

/// Imaginary part of the pre-projection inverse; zero (to roundoff) exactly
/// when `z` is Hermitian.
pub fn inverse_imag_magnitude(z: &[Complex64]) -> f64 {
    fourier::unitary_idft(z)
        .iter()
        .map(|v| v.im.abs())
        .fold(0.0, f64::max)
}

/// Groups bins into one-sided display features: DC, the conjugate pairs
/// `{k, n-k}`, and (for even n) Nyquist. Returns one index set per feature,
/// ordered by increasing frequency.
pub fn conjugate_pair_groups(n: usize) -> Vec<Vec<usize>> {
    let mut groups = Vec::new();
    groups.push(vec![0]);
    let half = n / 2;
    for k in 1..half {
        groups.push(vec![k, n - k]);
    }
    if n.is_multiple_of(2) && n >= 2 {
        groups.push(vec![half]);
    } else if n % 2 == 1 && half >= 1 {
        // odd n: k = half pairs with half+1
        // (already covered by the loop above when n is odd? no: loop stops
        // at half-1, so add the last pair explicitly)
        groups.push(vec![half, n - half]);
    }
    groups
}

/// Sums per-bin scores over conjugate-pair groups; the one-sided view used
/// for display and feature selection.
pub fn fold_conjugate_pairs(scores: &[f64]) -> Vec<(Vec<usize>, f64)> {
    conjugate_pair_groups(scores.len())
        .into_iter()
        .map(|bins| {
            let total = bins.iter().map(|&b| scores[b]).sum();
            (bins, total)
        })
        .collect()
}
