//! Unitary DFT primitives shared by the transform layer and the graph engine.
//!
//! Both directions carry the 1/sqrt(n) factor, so the transform is its own
//! inverse adjoint and Parseval holds exactly: ||F x|| = ||x||.

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::FftPlanner;
use std::sync::Mutex;

// rustfft caches plans per size inside the planner; we keep one process-wide
// planner and only hold the lock while fetching the plan handle.
static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

/// Forward unitary DFT: `z_k = n^{-1/2} * sum_m x_m exp(-2*pi*j*k*m/n)`.
pub fn unitary_dft(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    let fft = PLANNER.lock().unwrap().plan_fft_forward(n);
    let mut buf = input.to_vec();
    fft.process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Inverse unitary DFT: `x_m = n^{-1/2} * sum_k z_k exp(+2*pi*j*k*m/n)`.
pub fn unitary_idft(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    let fft = PLANNER.lock().unwrap().plan_fft_inverse(n);
    let mut buf = input.to_vec();
    fft.process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Forward unitary DFT of a real signal.
pub fn unitary_dft_real(input: &[f64]) -> Vec<Complex64> {
    let buf: Vec<Complex64> = input.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    unitary_dft(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Brute-force O(n^2) evaluation of the defining sums; the independent
    // oracle for everything FFT-backed.
    pub(crate) fn dft_oracle(input: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = input.len();
        let scale = 1.0 / (n as f64).sqrt();
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, &x) in input.iter().enumerate() {
                    let angle = sign * std::f64::consts::TAU * (k * m) as f64 / n as f64;
                    acc += x * Complex64::new(angle.cos(), angle.sin());
                }
                acc * scale
            })
            .collect()
    }

    #[test]
    fn matches_direct_summation() {
        let mut rng = crate::rng::XorShift64Star::new(123);
        for &n in &[2usize, 3, 8, 17, 64] {
            let input: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
                .collect();
            let fwd = unitary_dft(&input);
            let fwd_oracle = dft_oracle(&input, -1.0);
            let inv = unitary_idft(&input);
            let inv_oracle = dft_oracle(&input, 1.0);
            for k in 0..n {
                assert!((fwd[k] - fwd_oracle[k]).norm() < 1e-12, "fwd n={n} k={k}");
                assert!((inv[k] - inv_oracle[k]).norm() < 1e-12, "inv n={n} k={k}");
            }
        }
    }

    #[test]
    fn unitary_roundtrip_and_parseval() {
        let mut rng = crate::rng::XorShift64Star::new(9);
        let input: Vec<Complex64> = (0..128)
            .map(|_| Complex64::new(rng.gaussian(), rng.gaussian()))
            .collect();
        let z = unitary_dft(&input);
        let back = unitary_idft(&z);
        let max_err = input
            .iter()
            .zip(back.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-12);
        let norm_in: f64 = input.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let norm_out: f64 = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm_in - norm_out).abs() < 1e-10);
    }
}
