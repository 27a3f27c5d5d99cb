use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use xdig::transforms::fit_fastica;
use xdig::{
    attribute, backward, forward_eval, Algorithm, Bindings, PathSpec, RealTensor, Rule,
    TransformSpec,
};
use xdig_bench::{classifier, sample};

fn bench_forward_backward(c: &mut Criterion) {
    let graph = classifier().with_output(0).compile().unwrap();
    let x = sample();
    let bind = Bindings::new().bind(0, x);
    c.bench_function("model_forward", |b| {
        b.iter(|| forward_eval(&graph, &bind).unwrap())
    });
    c.bench_function("model_backward", |b| {
        b.iter(|| backward(&graph, &bind).unwrap())
    });
}

fn bench_attribution(c: &mut Criterion) {
    let graph = classifier().with_output(0).compile().unwrap();
    let x = sample();
    let n = x.len();
    let dft = TransformSpec::dft(n, 32.0);
    let ident = TransformSpec::identity(n);
    let mut group = c.benchmark_group("attribution_64_steps");
    for (name, transform, algorithm) in [
        ("time", &ident, Algorithm::Real),
        ("freq_split", &dft, Algorithm::ComplexSplit),
        ("freq_wirtinger", &dft, Algorithm::ComplexWirtinger),
    ] {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            let path = PathSpec::zero_baseline(transform, &[n], 64, Rule::RightRiemann).unwrap();
            b.iter(|| attribute(&graph, transform, &x, &path, algorithm).unwrap())
        });
    }
    group.finish();
}

fn bench_transforms(c: &mut Criterion) {
    let x = sample();
    let n = x.len();
    let dft = TransformSpec::dft(n, 32.0);
    c.bench_function("dft_forward_128", |b| b.iter(|| dft.forward(&x).unwrap()));

    let stl = TransformSpec::seasonal_trend(n, 16).unwrap();
    c.bench_function("seasonal_trend_128", |b| {
        b.iter(|| stl.forward(&x).unwrap())
    });

    let mut rng = xdig::rng::XorShift64Star::new(5);
    let half_width = 3.0f64.sqrt();
    let m = 2000;
    let data = RealTensor::new(
        vec![2, m],
        (0..2 * m)
            .map(|_| rng.uniform(-half_width, half_width))
            .collect(),
    )
    .unwrap();
    c.bench_function("fastica_fit_2x2000", |b| {
        b.iter(|| fit_fastica(&data, 2, 30000, 1e-8, 3).unwrap())
    });
}

criterion_group!(
    benches,
    bench_forward_backward,
    bench_attribution,
    bench_transforms
);
criterion_main!(benches);
