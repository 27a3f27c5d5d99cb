//! Seeded random smooth graphs for gradient validation.
//!
//! The generator only emits operations that are differentiable everywhere
//! (no ReLU), with magnitudes kept near unity so central differences at
//! moderate step sizes stay well conditioned. Used by the validation command
//! and the test suites.

use super::{Bindings, ComputeGraph, GraphBuilder, NodeId};
use crate::matrix::DenseMatrix;
use crate::rng::XorShift64Star;
use crate::tensor::{ComplexTensor, RealTensor};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    /// Length of the real input leaf.
    pub real_len: usize,
    /// Length of the complex input leaf; 0 omits it.
    pub complex_len: usize,
    /// Number of randomly chosen smooth layers per chain.
    pub layers: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            real_len: 8,
            complex_len: 4,
            layers: 3,
        }
    }
}

/// Builds a random smooth graph and a matching set of leaf bindings.
pub fn random_smooth_graph(seed: u64, cfg: &SynthConfig) -> (ComputeGraph, Bindings) {
    assert!(cfg.real_len > 0, "real leaf required");
    let mut rng = XorShift64Star::new(seed);
    let mut b = GraphBuilder::new();

    let x = b.real_leaf(vec![cfg.real_len]);
    let chain_r = real_chain(&mut b, &mut rng, x, cfg.real_len, cfg.layers);
    let mut out = b.mean(chain_r).unwrap();

    let mut bindings = Bindings::new();
    bindings.set(0, random_real(&mut rng, cfg.real_len));

    if cfg.complex_len > 0 {
        let z = b.complex_leaf(vec![cfg.complex_len]);
        let chain_c = complex_chain(&mut b, &mut rng, z, cfg.complex_len, cfg.layers);
        let p = b.real_part(chain_c).unwrap();
        let q = b.imag_part(chain_c).unwrap();
        let sp = b.mean(p).unwrap();
        let sq = b.mean(q).unwrap();
        let sq_scaled = b.scale(sq, 0.5).unwrap();
        let c_scalar = b.add(sp, sq_scaled).unwrap();
        out = b.add(out, c_scalar).unwrap();
        bindings.set(1, random_complex(&mut rng, cfg.complex_len));
    }

    (b.finish(out).expect("scalar output"), bindings)
}

/// Random smooth model over a single real leaf of length `n`; the building
/// block for randomized attribution checks.
pub fn random_real_model(seed: u64, n: usize) -> ComputeGraph {
    let mut rng = XorShift64Star::new(seed);
    let mut b = GraphBuilder::new();
    let x = b.real_leaf(vec![n]);
    let chain = real_chain(&mut b, &mut rng, x, n, 3);
    let out = b.mean(chain).unwrap();
    b.finish(out).expect("scalar output")
}

/// Random binding for [`random_real_model`]-shaped graphs.
pub fn random_real_input(seed: u64, n: usize) -> RealTensor {
    let mut rng = XorShift64Star::new(seed);
    random_real(&mut rng, n)
}

fn random_real(rng: &mut XorShift64Star, n: usize) -> RealTensor {
    let data: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    RealTensor::new(vec![n], data).unwrap()
}

fn random_complex(rng: &mut XorShift64Star, n: usize) -> ComplexTensor {
    let data: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
        .collect();
    ComplexTensor::new(vec![n], data).unwrap()
}

fn real_chain(
    b: &mut GraphBuilder,
    rng: &mut XorShift64Star,
    input: NodeId,
    n: usize,
    layers: usize,
) -> NodeId {
    let mut cur = input;
    for _ in 0..layers {
        cur = match rng.below(6) {
            0 => {
                let data: Vec<f64> = (0..n * n)
                    .map(|_| rng.uniform(-1.0, 1.0) / n as f64)
                    .collect();
                let m = DenseMatrix::new(n, n, data).unwrap();
                b.matvec(m, cur).unwrap()
            }
            1 => {
                let c = b.constant(random_real(rng, n));
                b.mul(cur, c).unwrap()
            }
            2 => {
                let c = b.constant(random_real(rng, n));
                b.add(cur, c).unwrap()
            }
            3 => b.sin(cur).unwrap(),
            4 => b.cos(cur).unwrap(),
            _ => {
                let damped = b.scale(cur, 0.3).unwrap();
                b.exp(damped).unwrap()
            }
        };
    }
    cur
}

fn complex_chain(
    b: &mut GraphBuilder,
    rng: &mut XorShift64Star,
    input: NodeId,
    n: usize,
    layers: usize,
) -> NodeId {
    let mut cur = input;
    for _ in 0..layers {
        cur = match rng.below(6) {
            0 => {
                let c = b.constant_complex(random_complex(rng, n));
                b.mul(cur, c).unwrap()
            }
            1 => b.inverse_dft(cur).unwrap(),
            2 => {
                // |.|^2-style non-holomorphic mix
                let cj = b.conj(cur).unwrap();
                let prod = b.mul(cur, cj).unwrap();
                b.scale(prod, 0.5).unwrap()
            }
            3 => {
                let damped = b.scale(cur, 0.25).unwrap();
                b.exp(damped).unwrap()
            }
            4 => {
                let damped = b.scale(cur, 0.25).unwrap();
                b.sin(damped).unwrap()
            }
            _ => {
                let c = b.constant_complex(random_complex(rng, n));
                b.add(cur, c).unwrap()
            }
        };
    }
    cur
}
