use super::synth::{random_smooth_graph, SynthConfig};
use super::*;
use crate::matrix::DenseMatrix;
use crate::tensor::{ComplexTensor, RealTensor};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// f(x) = sum(w . x), w = [1, 2]
fn linear_form() -> ComputeGraph {
    let mut b = GraphBuilder::new();
    let x = b.real_leaf(vec![2]);
    let w = b.constant(RealTensor::vector(&[1.0, 2.0]).unwrap());
    let wx = b.mul(x, w).unwrap();
    let out = b.sum(wx).unwrap();
    b.finish(out).unwrap()
}

/// g(z) = |z_0|^2 via z * conj(z)
fn modulus_squared() -> ComputeGraph {
    let mut b = GraphBuilder::new();
    let z = b.complex_leaf(vec![1]);
    let zc = b.conj(z).unwrap();
    let prod = b.mul(z, zc).unwrap();
    let re = b.real_part(prod).unwrap();
    let out = b.sum(re).unwrap();
    b.finish(out).unwrap()
}

#[test]
fn forward_linear_form() {
    let g = linear_form();
    let bind = Bindings::new().bind(0, RealTensor::vector(&[3.0, 4.0]).unwrap());
    assert_eq!(forward_eval(&g, &bind).unwrap(), 11.0);
}

#[test]
fn forward_modulus_squared() {
    let g = modulus_squared();
    let bind = Bindings::new().bind(0, ComplexTensor::vector(&[c(1.0, 1.0)]).unwrap());
    assert!((forward_eval(&g, &bind).unwrap() - 2.0).abs() < 1e-15);
}

#[test]
fn forward_relu_pool_zero_input() {
    let mut b = GraphBuilder::new();
    let x = b.real_leaf(vec![8]);
    let k = vec![0.25, 0.5, 0.25];
    let conv = b.conv1d(k, x).unwrap();
    let act = b.relu(conv).unwrap();
    let out = b.mean(act).unwrap();
    let g = b.finish(out).unwrap();
    let bind = Bindings::new().bind(0, RealTensor::zeros(vec![8]));
    assert_eq!(forward_eval(&g, &bind).unwrap(), 0.0);
}

#[test]
fn backward_real_part_of_z() {
    let mut b = GraphBuilder::new();
    let z = b.complex_leaf(vec![1]);
    let re = b.real_part(z).unwrap();
    let out = b.sum(re).unwrap();
    let g = b.finish(out).unwrap();
    let bind = Bindings::new().bind(0, ComplexTensor::vector(&[c(2.0, 3.0)]).unwrap());
    let (val, grads) = backward(&g, &bind).unwrap();
    assert_eq!(val, 2.0);
    assert_eq!(grads.wirtinger(0)[0], c(0.5, 0.0));
}

#[test]
fn backward_modulus_squared_is_conjugate() {
    let g = modulus_squared();
    let bind = Bindings::new().bind(0, ComplexTensor::vector(&[c(1.0, 2.0)]).unwrap());
    let (val, grads) = backward(&g, &bind).unwrap();
    assert!((val - 5.0).abs() < 1e-15);
    let w = grads.wirtinger(0)[0];
    assert!((w - c(1.0, -2.0)).norm() < 1e-14, "got {w}");
    // raw pair: d/dp = 2p, d/dq = 2q
    let (dp, dq) = grads.real_imag_pair(0);
    assert!((dp[0] - 2.0).abs() < 1e-14);
    assert!((dq[0] - 4.0).abs() < 1e-14);
    assert!(grads.conjugate_symmetry_residual() < 1e-12);
}

#[test]
fn backward_linear_gradient_anywhere() {
    let g = linear_form();
    for x in [[3.0, 4.0], [0.0, 0.0], [-7.5, 2.25]] {
        let bind = Bindings::new().bind(0, RealTensor::vector(&x).unwrap());
        let (_, grads) = backward(&g, &bind).unwrap();
        assert_eq!(grads.real(0), &[1.0, 2.0]);
    }
}

#[test]
fn relu_subgradient_zero_at_kink() {
    let mut b = GraphBuilder::new();
    let x = b.real_leaf(vec![3]);
    let act = b.relu(x).unwrap();
    let out = b.sum(act).unwrap();
    let g = b.finish(out).unwrap();
    let bind = Bindings::new().bind(0, RealTensor::vector(&[-1.0, 0.0, 2.0]).unwrap());
    let (_, grads) = backward(&g, &bind).unwrap();
    assert_eq!(grads.real(0), &[0.0, 0.0, 1.0]);
}

#[test]
fn conv1d_same_padding_cross_correlation() {
    let mut b = GraphBuilder::new();
    let x = b.real_leaf(vec![4]);
    let conv = b.conv1d(vec![1.0, 2.0, 3.0], x).unwrap();
    let out = b.sum(conv).unwrap();
    let g = b.finish(out).unwrap();
    let bind = Bindings::new().bind(0, RealTensor::vector(&[1.0, 2.0, 3.0, 4.0]).unwrap());
    let values = g.eval_values(&bind).unwrap();
    let conv_out = values[conv.0].as_real().unwrap().data().to_vec();
    // center tap index 1; tap k reads x[i + k - 1]
    assert_eq!(conv_out, vec![8.0, 14.0, 20.0, 11.0]);
}

#[test]
fn fd_check_linear_is_exact() {
    let g = linear_form();
    let bind = Bindings::new().bind(0, RealTensor::vector(&[3.0, 4.0]).unwrap());
    let err = finite_difference_check(&g, &bind, 1e-4).unwrap();
    assert!(err <= 1e-10, "err {err}");
}

#[test]
fn fd_check_modulus_squared() {
    let g = modulus_squared();
    let bind = Bindings::new().bind(0, ComplexTensor::vector(&[c(1.0, 2.0)]).unwrap());
    let err = finite_difference_check(&g, &bind, 1e-4).unwrap();
    assert!(err <= 1e-7, "err {err}");
}

#[test]
fn fd_check_random_smooth_graphs_100_seeds() {
    let cfg = SynthConfig::default();
    let mut worst: f64 = 0.0;
    let mut worst_sym: f64 = 0.0;
    for seed in 0..100 {
        let (g, bind) = random_smooth_graph(seed, &cfg);
        let err = finite_difference_check(&g, &bind, 1e-4).unwrap();
        worst = worst.max(err);
        let (_, grads) = backward(&g, &bind).unwrap();
        worst_sym = worst_sym.max(grads.conjugate_symmetry_residual());
    }
    assert!(worst <= 1e-5, "worst fd error {worst}");
    assert!(worst_sym <= 1e-12, "worst symmetry residual {worst_sym}");
}

#[test]
fn conj_wirtinger_accumulated_independently() {
    // conj(d out / d z) must match d out / d conj(z) without being copied
    // from it; exercised through a non-holomorphic chain.
    let cfg = SynthConfig {
        real_len: 4,
        complex_len: 6,
        layers: 4,
    };
    for seed in [1, 17, 99] {
        let (g, bind) = random_smooth_graph(seed, &cfg);
        let (_, grads) = backward(&g, &bind).unwrap();
        let a = grads.wirtinger(1);
        let b = grads.conj_wirtinger(1);
        for i in 0..a.len() {
            assert!((b[i] - a[i].conj()).norm() <= 1e-12);
        }
    }
}

#[test]
fn real_leaf_reduction_wirtinger_is_half_dp() {
    // g depends on the real parts only; d g / d z must equal (d g / d p) / 2
    // exactly, with zero imaginary part.
    let mut b = GraphBuilder::new();
    let z = b.complex_leaf(vec![3]);
    let p = b.real_part(z).unwrap();
    let w = b.constant(RealTensor::vector(&[0.5, -1.5, 2.0]).unwrap());
    let pw = b.mul(p, w).unwrap();
    let s = b.sin(pw).unwrap();
    let out = b.mean(s).unwrap();
    let g = b.finish(out).unwrap();
    let bind = Bindings::new().bind(
        0,
        ComplexTensor::vector(&[c(0.3, 0.0), c(-0.8, 0.0), c(1.1, 0.0)]).unwrap(),
    );
    let (_, grads) = backward(&g, &bind).unwrap();
    let (dp, dq) = grads.real_imag_pair(0);
    let wirt = grads.wirtinger(0);
    for i in 0..3 {
        assert_eq!(dq[i], 0.0);
        assert_eq!(wirt[i].re, 0.5 * dp[i]);
        assert_eq!(wirt[i].im, 0.0);
    }
}

#[test]
fn evaluation_is_deterministic() {
    let cfg = SynthConfig::default();
    let (g, bind) = random_smooth_graph(42, &cfg);
    let (v1, g1) = backward(&g, &bind).unwrap();
    let (v2, g2) = backward(&g, &bind).unwrap();
    assert_eq!(v1, v2);
    assert_eq!(g1.real(0), g2.real(0));
    assert_eq!(g1.wirtinger(1), g2.wirtinger(1));
}

#[test]
fn unbound_leaf_is_reported() {
    let g = linear_form();
    let err = forward_eval(&g, &Bindings::new()).unwrap_err();
    assert!(matches!(err, GraphError::UnboundLeaf { slot: 0 }));
}

#[test]
fn binding_shape_mismatch_is_reported() {
    let g = linear_form();
    let bind = Bindings::new().bind(0, RealTensor::vector(&[1.0, 2.0, 3.0]).unwrap());
    let err = forward_eval(&g, &bind).unwrap_err();
    assert!(matches!(err, GraphError::BindingMismatch { slot: 0, .. }));
}

#[test]
fn non_finite_intermediate_names_node() {
    let mut b = GraphBuilder::new();
    let x = b.real_leaf(vec![1]);
    let big = b.scale(x, 1000.0).unwrap();
    let boom = b.exp(big).unwrap();
    let out = b.sum(boom).unwrap();
    let g = b.finish(out).unwrap();
    let bind = Bindings::new().bind(0, RealTensor::vector(&[1.0]).unwrap());
    match forward_eval(&g, &bind).unwrap_err() {
        GraphError::NonFiniteIntermediate { node, op } => {
            assert_eq!(node, boom.0);
            assert_eq!(op, "exp");
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn kind_errors_at_construction() {
    let mut b = GraphBuilder::new();
    let z = b.complex_leaf(vec![2]);
    assert!(matches!(
        b.relu(z),
        Err(GraphError::UnsupportedKind { op: "relu" })
    ));
    let x = b.real_leaf(vec![2]);
    assert!(matches!(b.add(x, z), Err(GraphError::KindMismatch { .. })));
}

#[test]
fn scalar_output_enforced() {
    let mut b = GraphBuilder::new();
    let x = b.real_leaf(vec![3]);
    assert!(matches!(b.finish(x), Err(GraphError::BadOutput { .. })));
}

#[test]
fn inline_substitutes_leaves() {
    // inner: f(x) = sum([1,2,3] . x)
    let mut inner = GraphBuilder::new();
    let x = inner.real_leaf(vec![3]);
    let w = inner.constant(RealTensor::vector(&[1.0, 2.0, 3.0]).unwrap());
    let wx = inner.mul(x, w).unwrap();
    let s = inner.sum(wx).unwrap();
    let f = inner.finish(s).unwrap();

    // outer: g(y) = f(2 y)
    let mut outer = GraphBuilder::new();
    let y = outer.real_leaf(vec![3]);
    let scaled = outer.scale(y, 2.0).unwrap();
    let out = outer.inline(&f, &[scaled]).unwrap();
    let g = outer.finish(out).unwrap();

    let bind = Bindings::new().bind(0, RealTensor::vector(&[1.0, 1.0, 1.0]).unwrap());
    assert_eq!(forward_eval(&g, &bind).unwrap(), 12.0);
    let (_, grads) = backward(&g, &bind).unwrap();
    assert_eq!(grads.real(0), &[2.0, 4.0, 6.0]);
}

#[test]
fn inline_rejects_mismatched_replacement() {
    let f = linear_form(); // expects leaf of len 2
    let mut outer = GraphBuilder::new();
    let y = outer.real_leaf(vec![3]);
    assert!(outer.inline(&f, &[y]).is_err());
}

#[test]
fn fd_check_structured_ops() {
    // matvec + conv + slice/select/concat + mix_channels, all smooth
    let mut b = GraphBuilder::new();
    let x = b.real_leaf(vec![6]);
    let m = DenseMatrix::new(4, 6, (0..24).map(|i| (i as f64 * 0.13).sin()).collect()).unwrap();
    let mv = b.matvec(m, x).unwrap();
    let conv = b.conv1d(vec![0.2, -0.4, 0.6], mv).unwrap();
    let head = b.slice(conv, 0, 2).unwrap();
    let tail = b.slice(conv, 2, 2).unwrap();
    let joined = b.concat(vec![head, tail]).unwrap();
    let s = b.sin(joined).unwrap();
    let picked = b.select(s, 3).unwrap();
    let msum = b.mean(s).unwrap();
    let out = b.add(picked, msum).unwrap();
    let g = b.finish(out).unwrap();
    let bind = Bindings::new().bind(
        0,
        RealTensor::vector(&[0.1, -0.2, 0.3, 0.4, -0.5, 0.6]).unwrap(),
    );
    let err = finite_difference_check(&g, &bind, 1e-5).unwrap();
    assert!(err <= 1e-7, "err {err}");

    let mut b2 = GraphBuilder::new();
    let xc = b2.real_leaf(vec![2, 3]);
    let mix = DenseMatrix::new(2, 2, vec![0.8, -0.3, 0.5, 1.1]).unwrap();
    let mixed = b2.mix_channels(mix, xc).unwrap();
    let sq = b2.mul(mixed, mixed).unwrap();
    let out2 = b2.mean(sq).unwrap();
    let g2 = b2.finish(out2).unwrap();
    let bind2 = Bindings::new().bind(
        0,
        RealTensor::new(vec![2, 3], vec![0.4, -0.7, 0.2, 0.9, 0.1, -0.3]).unwrap(),
    );
    let err2 = finite_difference_check(&g2, &bind2, 1e-5).unwrap();
    assert!(err2 <= 1e-7, "err {err2}");
}

#[test]
fn fd_check_inverse_dft_path() {
    let mut b = GraphBuilder::new();
    let z = b.complex_leaf(vec![8]);
    let x = b.inverse_dft(z).unwrap();
    let re = b.real_part(x).unwrap();
    let act = b.sin(re).unwrap();
    let out = b.mean(act).unwrap();
    let g = b.finish(out).unwrap();
    let data: Vec<Complex64> = (0..8)
        .map(|i| c((i as f64 * 0.7).sin(), (i as f64 * 0.4).cos()))
        .collect();
    let bind = Bindings::new().bind(0, ComplexTensor::vector(&data).unwrap());
    let err = finite_difference_check(&g, &bind, 1e-5).unwrap();
    assert!(err <= 1e-8, "err {err}");
}

#[test]
fn concurrent_evaluation_is_safe_and_identical() {
    // one immutable graph, many threads, private workspaces
    let cfg = SynthConfig::default();
    let (g, bind) = random_smooth_graph(2024, &cfg);
    let (v0, g0) = backward(&g, &bind).unwrap();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..4)
            .map(|_| {
                scope.spawn(|| {
                    let (v, grads) = backward(&g, &bind).unwrap();
                    (v, grads.real(0).to_vec(), grads.wirtinger(1).to_vec())
                })
            })
            .collect();
        for h in handles {
            let (v, real, wirt) = h.join().unwrap();
            assert_eq!(v, v0);
            assert_eq!(real, g0.real(0));
            assert_eq!(wirt, g0.wirtinger(1));
        }
    });
}
