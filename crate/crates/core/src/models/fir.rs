//! Windowed-sinc FIR design and frequency response evaluation.

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Lowpass,
    Highpass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Hamming,
}

/// Validated FIR design parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterDesign {
    pub kind: FilterKind,
    pub cutoff_hz: f64,
    pub taps: usize,
    pub window: Window,
}

impl FilterDesign {
    pub fn new(kind: FilterKind, cutoff_hz: f64, taps: usize) -> Self {
        Self {
            kind,
            cutoff_hz,
            taps,
            window: Window::Hamming,
        }
    }

    /// Realizes the kernel at a sampling rate.
    pub fn kernel(&self, fs: f64) -> Result<Vec<f64>, ModelError> {
        design_fir(self.kind, self.cutoff_hz, fs, self.taps)
    }
}

/// Hamming-windowed sinc kernel. The lowpass is normalized to unit DC gain;
/// the highpass is its spectral inversion (unit impulse at the center minus
/// the lowpass), so its DC gain is zero.
pub fn design_fir(
    kind: FilterKind,
    cutoff_hz: f64,
    fs: f64,
    taps: usize,
) -> Result<Vec<f64>, ModelError> {
    if taps < 3 || taps.is_multiple_of(2) {
        return Err(ModelError::FilterDesign {
            reason: format!("taps must be odd and >= 3, got {taps}"),
        });
    }
    if !(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0) {
        return Err(ModelError::FilterDesign {
            reason: format!("cutoff {cutoff_hz} Hz outside (0, {})", fs / 2.0),
        });
    }
    let center = (taps - 1) / 2;
    let fc = cutoff_hz / fs; // cycles per sample
    let mut kernel: Vec<f64> = (0..taps)
        .map(|m| {
            let k = m as isize - center as isize;
            let sinc = if k == 0 {
                2.0 * fc
            } else {
                (std::f64::consts::TAU * fc * k as f64).sin() / (std::f64::consts::PI * k as f64)
            };
            let window = 0.54 - 0.46 * (std::f64::consts::TAU * m as f64 / (taps - 1) as f64).cos();
            sinc * window
        })
        .collect();
    let total: f64 = kernel.iter().sum();
    for v in kernel.iter_mut() {
        *v /= total;
    }
    if kind == FilterKind::Highpass {
        for v in kernel.iter_mut() {
            *v = -*v;
        }
        kernel[center] += 1.0;
    }
    Ok(kernel)
}

/// Magnitude of the kernel's discrete-time Fourier response at `xi_hz`:
/// `b = |sum_m w_m exp(-2 pi j (xi/fs) m)|`.
pub fn frequency_response(kernel: &[f64], xi_hz: f64, fs: f64) -> f64 {
    let xi = xi_hz / fs;
    let (mut re, mut im) = (0.0, 0.0);
    for (m, &w) in kernel.iter().enumerate() {
        let angle = -std::f64::consts::TAU * xi * m as f64;
        re += w * angle.cos();
        im += w * angle.sin();
    }
    (re * re + im * im).sqrt()
}

/// Closed form for the single-channel conv/ReLU/average-pool model driven by
/// a pure sinusoid of amplitude `a` through a filter with gain `b` at the
/// signal frequency: the pooled output is `a * b / pi`.
pub fn analytic_sinusoid_output(a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0);
    a * b / std::f64::consts::PI
}
