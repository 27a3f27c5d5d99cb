//! Cross-check against relevance redistribution through a virtual
//! spectral layer.
//!
//! Time-domain scores can be pushed into the frequency domain directly:
//! with `z_k - zhat_k = r_k e^{j phi_k}` and the unitary inverse matrix
//! `T^-1_{nk} = n^{-1/2} e^{2 pi j k n / N}`,
//!
//! ```text
//! R_k = sum_n Re[ T^-1_{nk} (z_k - zhat_k) ] * IG_n / (x_n - xhat_n)
//!     = (r_k / sqrt(N)) sum_n cos(2 pi k n / N + phi_k) * IG_n / (x_n - xhat_n)
//! ```
//!
//! The constant matters: the inverse here projects onto the real part, which
//! halves the Wirtinger derivative and cancels the leading 2 of the
//! complex-domain attribution formula; any other constant would break
//! completeness of the redistributed scores. `R` must then coincide with the
//! frequency-domain attribution computed by the engine: exactly (to
//! roundoff) for smooth models, and up to kink-crossing noise for ReLU
//! networks at fine quadrature. Coordinates with `x_n == xhat_n` make the
//! redistribution singular; they are excluded from the sum and reported.

use super::{attribute, Algorithm, AttributionError, AttributionResult, PathSpec, Rule};
use crate::autodiff::ComputeGraph;
use crate::fourier;
use crate::tensor::RealTensor;
use crate::transforms::TransformSpec;

#[derive(Debug, Clone)]
pub struct InspectionReport {
    /// Max absolute per-bin difference between the redistributed scores and
    /// the engine's frequency-domain scores.
    pub max_deviation: f64,
    /// Coordinates skipped because `|x_n - xhat_n| <= 1e-12`.
    pub excluded: Vec<usize>,
    pub redistributed: Vec<f64>,
    pub frequency: AttributionResult,
    pub time: AttributionResult,
}

/// Runs both routes at the same right-Riemann path and compares.
pub fn virtual_inspection_check(
    model: &ComputeGraph,
    x: &RealTensor,
    x_baseline: &RealTensor,
    n_steps: usize,
) -> Result<InspectionReport, AttributionError> {
    let n = x.len();
    let rule = Rule::RightRiemann;

    // route 1: classic time-domain attribution
    let identity = TransformSpec::identity(n);
    let time_baseline = identity.forward(x_baseline)?;
    let time = attribute(
        model,
        &identity,
        x,
        &PathSpec::new(time_baseline, n_steps, rule),
        Algorithm::Real,
    )?;

    // route 2: frequency-domain attribution on the same path
    // (fs only affects labels, not scores)
    let dft = TransformSpec::dft(n, 1.0);
    let freq_baseline = dft.forward(x_baseline)?;
    let frequency = attribute(
        model,
        &dft,
        x,
        &PathSpec::new(freq_baseline, n_steps, rule),
        Algorithm::ComplexWirtinger,
    )?;

    // redistribute route 1 through the spectral layer
    let z = fourier::unitary_dft_real(x.data());
    let zhat = fourier::unitary_dft_real(x_baseline.data());
    let mut excluded = Vec::new();
    let mut ratios = vec![0.0; n];
    for (m, ratio) in ratios.iter_mut().enumerate() {
        let diff = x.data()[m] - x_baseline.data()[m];
        if diff.abs() <= 1e-12 {
            excluded.push(m);
        } else {
            *ratio = time.scores[m] / diff;
        }
    }
    if excluded.len() == n {
        return Err(AttributionError::AllCoordinatesDegenerate);
    }

    // excluded coordinates stay at ratio 0 and drop out of the sum
    let scale = 1.0 / (n as f64).sqrt();
    let redistributed: Vec<f64> = (0..n)
        .map(|k| {
            let dz = z[k] - zhat[k];
            let mut acc = 0.0;
            for (m, &ratio) in ratios.iter().enumerate() {
                let angle = std::f64::consts::TAU * (k * m) as f64 / n as f64;
                let basis = num_complex::Complex64::new(angle.cos(), angle.sin());
                acc += (basis * dz).re * scale * ratio;
            }
            acc
        })
        .collect();

    let max_deviation = redistributed
        .iter()
        .zip(frequency.scores.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    Ok(InspectionReport {
        max_deviation,
        excluded,
        redistributed,
        frequency,
        time,
    })
}
