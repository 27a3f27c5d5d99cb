//! Fitted linear (unmixing) target domain and the FastICA estimator.

use super::{DomainKind, TargetRepresentation, TransformError, TransformSpec};
use crate::matrix::DenseMatrix;
use crate::rng::XorShift64Star;
use crate::tensor::{RealTensor, TensorValue};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Fit diagnostics stored alongside a fitted linear transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitMeta {
    /// False means the fixed-point loop hit `max_iter` first; the last
    /// iterate is still returned and usable, but flagged.
    pub converged: bool,
    pub iterations: usize,
    pub max_iter: usize,
    pub tol: f64,
    /// Final change measure `max_i |1 - |<w_i', w_i>||`.
    pub final_delta: f64,
    /// Excess kurtosis of each recovered component on the whitened data.
    pub excess_kurtosis: Vec<f64>,
    /// False when some component is statistically indistinguishable from
    /// Gaussian (|excess kurtosis| below 4 sigma of the m-sample Gaussian
    /// estimator), in which case the recovered rotation is arbitrary.
    pub identifiable: bool,
}

impl FitMeta {
    /// True when the fit should not be trusted: the loop ran out of
    /// iterations, or a recovered component looks Gaussian.
    pub fn warning_state(&self) -> bool {
        !self.converged || !self.identifiable
    }
}

/// `s = W x`, applied per time step to a `[channels, len]` signal.
pub fn linear_forward(
    x: &RealTensor,
    w: &DenseMatrix,
) -> Result<TargetRepresentation, TransformError> {
    let c = w.rows();
    if x.shape().len() != 2 || x.shape()[0] != c {
        return Err(TransformError::ShapeMismatch {
            got: x.shape().to_vec(),
            expected: format!("[{c}, len]"),
        });
    }
    let m = x.shape()[1];
    let out = apply_channels(w, x.data(), c, m);
    let mut labels = Vec::with_capacity(c * m);
    for ci in 0..c {
        labels.extend(std::iter::repeat_n(format!("c{ci}"), m));
    }
    Ok(TargetRepresentation {
        domain: DomainKind::Linear,
        values: TensorValue::Real(RealTensor::new(vec![c, m], out)?),
        labels,
    })
}

/// `x = A s`; exact inverse of [`linear_forward`] for the stored pair.
pub fn linear_inverse(s: &RealTensor, a: &DenseMatrix) -> Result<RealTensor, TransformError> {
    let c = a.rows();
    if s.shape().len() != 2 || s.shape()[0] != c {
        return Err(TransformError::ShapeMismatch {
            got: s.shape().to_vec(),
            expected: format!("[{c}, len]"),
        });
    }
    let m = s.shape()[1];
    let out = apply_channels(a, s.data(), c, m);
    Ok(RealTensor::new(vec![c, m], out)?)
}

fn apply_channels(mat: &DenseMatrix, data: &[f64], c: usize, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; c * m];
    for ci in 0..c {
        for k in 0..c {
            let a = mat.get(ci, k);
            if a == 0.0 {
                continue;
            }
            let src = &data[k * m..(k + 1) * m];
            let dst = &mut out[ci * m..(ci + 1) * m];
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                *d += a * s;
            }
        }
    }
    out
}

/// FastICA with the tanh contrast and symmetric decorrelation.
///
/// Whitening is the symmetric (zero-phase) `C^{-1/2}` built from the
/// eigendecomposition of the sample covariance, so data that is already
/// white passes through essentially unchanged. The initial unmixing guess is
/// a seeded random orthogonal matrix; the returned transform composes the
/// fitted rotation with the whitening matrix, with no centering offset, so
/// the transform itself stays purely linear.
///
/// Non-convergence within `max_iter` is not an error: the last iterate is
/// returned with `FitMeta::converged == false`.
pub fn fit_fastica(
    data: &RealTensor,
    n_components: usize,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<TransformSpec, TransformError> {
    let c = check_data(data, n_components)?;
    let mut rng = XorShift64Star::new(seed);
    let gauss = DMatrix::from_fn(c, c, |_, _| rng.gaussian());
    let init = symmetric_decorrelate(&gauss)?;
    fastica_impl(data, max_iter, tol, Some(seed), &init)
}

/// [`fit_fastica`] with a caller-supplied initial unmixing guess; rows are
/// orthonormalized before the first iteration.
pub fn fit_fastica_init(
    data: &RealTensor,
    n_components: usize,
    max_iter: usize,
    tol: f64,
    init: &DenseMatrix,
) -> Result<TransformSpec, TransformError> {
    check_data(data, n_components)?;
    let init = symmetric_decorrelate(&init.to_nalgebra())?;
    fastica_impl(data, max_iter, tol, None, &init)
}

fn check_data(data: &RealTensor, n_components: usize) -> Result<usize, TransformError> {
    let shape = data.shape();
    if shape.len() != 2 {
        return Err(TransformError::ShapeMismatch {
            got: shape.to_vec(),
            expected: "[channels, samples]".into(),
        });
    }
    let (c, m) = (shape[0], shape[1]);
    if n_components != c {
        return Err(TransformError::ComponentCount {
            requested: n_components,
            channels: c,
        });
    }
    if m <= c {
        return Err(TransformError::TooFewSamples {
            channels: c,
            samples: m,
        });
    }
    Ok(c)
}

fn fastica_impl(
    data: &RealTensor,
    max_iter: usize,
    tol: f64,
    seed: Option<u64>,
    init: &DMatrix<f64>,
) -> Result<TransformSpec, TransformError> {
    let (c, m) = (data.shape()[0], data.shape()[1]);
    let x = DMatrix::from_row_slice(c, m, data.data());

    // center rows (fitting only; the returned transform has no offset)
    let mut xc = x;
    for i in 0..c {
        let mean = xc.row(i).sum() / m as f64;
        for j in 0..m {
            xc[(i, j)] -= mean;
        }
    }

    // symmetric whitening K = C^{-1/2}
    let cov = &xc * xc.transpose() / m as f64;
    let k = inverse_sqrt(&cov)?;
    let xw = &k * &xc;

    let mut w = init.clone();
    let mut iterations = 0;
    let mut converged = false;
    let mut final_delta = f64::INFINITY;
    while iterations < max_iter {
        iterations += 1;
        let u = &w * &xw; // c x m
        let g = u.map(f64::tanh);
        let mut w_new = &g * xw.transpose() / m as f64;
        for i in 0..c {
            let mean_gprime = (0..m).map(|j| 1.0 - g[(i, j)] * g[(i, j)]).sum::<f64>() / m as f64;
            for j in 0..c {
                w_new[(i, j)] -= mean_gprime * w[(i, j)];
            }
        }
        let w_new = symmetric_decorrelate(&w_new)?;
        final_delta = (0..c)
            .map(|i| (1.0 - w_new.row(i).dot(&w.row(i)).abs()).abs())
            .fold(0.0, f64::max);
        w = w_new;
        if final_delta < tol {
            converged = true;
            break;
        }
    }

    // identifiability: a component with Gaussian-level kurtosis leaves the
    // rotation undetermined, so the fit gets flagged even if it converged
    let u = &w * &xw;
    let excess_kurtosis: Vec<f64> = (0..c)
        .map(|i| (0..m).map(|j| u[(i, j)].powi(4)).sum::<f64>() / m as f64 - 3.0)
        .collect();
    let cutoff = 4.0 * (24.0 / m as f64).sqrt();
    let identifiable = excess_kurtosis.iter().all(|k| k.abs() >= cutoff);

    let w_total = &w * &k;
    let a_total = w_total
        .clone()
        .try_inverse()
        .ok_or(TransformError::SingularMatrix)?;
    TransformSpec::linear_pair(
        DenseMatrix::from_nalgebra(&w_total),
        DenseMatrix::from_nalgebra(&a_total),
        seed,
        Some(FitMeta {
            converged,
            iterations,
            max_iter,
            tol,
            final_delta,
            excess_kurtosis,
            identifiable,
        }),
    )
}

/// `M^{-1/2}` for symmetric positive definite `M` via eigendecomposition.
fn inverse_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>, TransformError> {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cutoff = max_ev * 1e-12;
    let mut d = DMatrix::zeros(m.nrows(), m.nrows());
    for (i, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev <= cutoff {
            return Err(TransformError::RankDeficient { value: ev });
        }
        d[(i, i)] = 1.0 / ev.sqrt();
    }
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// `(W W^T)^{-1/2} W`: makes the rows of `W` orthonormal symmetrically.
fn symmetric_decorrelate(w: &DMatrix<f64>) -> Result<DMatrix<f64>, TransformError> {
    let wwt = w * w.transpose();
    Ok(inverse_sqrt(&wwt)? * w)
}

/// Amari index of a permutation-candidate matrix `P` (here `W_est * A_true`):
/// zero exactly when `P` is a scaled permutation, and bounded away from zero
/// otherwise. Standard recovery score for blind source separation.
pub fn amari_index(p: &DenseMatrix) -> f64 {
    let n = p.rows();
    assert_eq!(n, p.cols(), "amari index needs a square matrix");
    let abs = |i: usize, j: usize| p.get(i, j).abs();
    let mut total = 0.0;
    for i in 0..n {
        let row_max = (0..n).map(|j| abs(i, j)).fold(f64::MIN, f64::max);
        let row_sum: f64 = (0..n).map(|j| abs(i, j)).sum();
        total += row_sum / row_max - 1.0;
    }
    for j in 0..n {
        let col_max = (0..n).map(|i| abs(i, j)).fold(f64::MIN, f64::max);
        let col_sum: f64 = (0..n).map(|i| abs(i, j)).sum();
        total += col_sum / col_max - 1.0;
    }
    total / (2.0 * n as f64 * (n as f64 - 1.0))
}
