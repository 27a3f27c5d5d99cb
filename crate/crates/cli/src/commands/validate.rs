//! `xdig validate`: run the invariant suite and report per-check results.
//!
//! Checks either hold for any correct build (transform roundtrips, gradient
//! correctness, algorithm equivalence, completeness) or pin the reference
//! model's design (filter gains, closed-form fidelity, classifier accuracy).
//! Completeness holds for arbitrary weights; the design checks are the ones
//! that catch corrupted models.

use super::load_model_file;
use crate::config::config_hash;
use crate::errors::{io_err, CliError};
use clap::Args;
use std::path::PathBuf;
use xdig::autodiff::synth::{
    random_real_input, random_real_model, random_smooth_graph, SynthConfig,
};
use xdig::eval::{generate_two_class, DatasetSpec};
use xdig::models::{analytic_sinusoid_output, frequency_response, Layer};
use xdig::transforms::{amari_index, fit_fastica};
use xdig::{
    attribute, backward, finite_difference_check, Algorithm, Bindings, DenseMatrix, ModelSpec,
    PathSpec, RealTensor, Rule, TransformSpec,
};

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Model JSON to validate; defaults to the built-in classifier.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 1024)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Optional report file (text or json per --format).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "text")]
    pub format: String,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
enum Direction {
    AtMost,
    AtLeast,
}

#[derive(Debug, serde::Serialize)]
struct Check {
    name: &'static str,
    measured: f64,
    threshold: f64,
    direction: Direction,
    pass: bool,
}

impl Check {
    fn at_most(name: &'static str, measured: f64, threshold: f64) -> Self {
        Check {
            name,
            measured,
            threshold,
            direction: Direction::AtMost,
            pass: measured <= threshold,
        }
    }

    fn at_least(name: &'static str, measured: f64, threshold: f64) -> Self {
        Check {
            name,
            measured,
            threshold,
            direction: Direction::AtLeast,
            pass: measured >= threshold,
        }
    }
}

pub fn run(args: &ValidateArgs) -> Result<(), CliError> {
    let model = match &args.model {
        Some(path) => load_model_file(path)?,
        None => ModelSpec::sinusoid_classifier_default(),
    };
    let mut checks = Vec::new();

    transform_checks(&mut checks, args.seed)?;
    gradient_checks(&mut checks, args.seed)?;
    engine_checks(&mut checks, args.seed)?;
    model_checks(&mut checks, &model, args.steps, args.seed)?;
    builtin_checks(&mut checks, args.seed)?;

    let all_pass = checks.iter().all(|c| c.pass);
    let mut report = String::new();
    for c in &checks {
        let op = match c.direction {
            Direction::AtMost => "<=",
            Direction::AtLeast => ">=",
        };
        report.push_str(&format!(
            "{} {:28} measured={:<12.4e} threshold {op} {:.4e}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.threshold
        ));
    }
    print!("{report}");

    if let Some(path) = &args.out {
        let contents = match args.format.as_str() {
            "json" => {
                let doc = serde_json::json!({
                    "version": crate::config::OUTPUT_VERSION,
                    "seed": args.seed,
                    "config": config_hash(&serde_json::json!({
                        "command": "validate",
                        "model": args.model.as_ref().map(|p| p.display().to_string()),
                        "steps": args.steps,
                        "seed": args.seed,
                    })),
                    "pass": all_pass,
                    "checks": checks,
                });
                serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
            }
            "text" => report.clone(),
            other => return Err(CliError::config(format!("unknown format {other:?}"))),
        };
        std::fs::write(path, contents).map_err(|e| io_err(path, e))?;
    }

    if all_pass {
        Ok(())
    } else {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        Err(CliError::validation(format!(
            "validation failed: {}",
            failed.join(", ")
        )))
    }
}

fn transform_checks(checks: &mut Vec<Check>, seed: u64) -> Result<(), CliError> {
    let mut rng = xdig::rng::XorShift64Star::new(seed ^ 0xD1F7);
    let n = 64;
    let dft = TransformSpec::dft(n, 32.0);
    let mut worst_round: f64 = 0.0;
    let mut worst_parseval: f64 = 0.0;
    for _ in 0..20 {
        let x: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
        let xt = RealTensor::vector(&x).unwrap();
        let z = dft.forward(&xt)?;
        let back = dft.inverse(&z.values)?;
        worst_round = worst_round.max(max_abs_diff(back.data(), &x));
        let norm_x = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let norm_z = z
            .values
            .as_complex()
            .unwrap()
            .data()
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst_parseval = worst_parseval.max((norm_x - norm_z).abs());
    }
    checks.push(Check::at_most("dft_roundtrip", worst_round, 1e-10));
    checks.push(Check::at_most("dft_parseval", worst_parseval, 1e-10));

    let mut entries: Vec<f64> = (0..16).map(|_| rng.uniform(-0.4, 0.4)).collect();
    for i in 0..4 {
        entries[i * 4 + i] += 1.5;
    }
    let linear = TransformSpec::linear(DenseMatrix::new(4, 4, entries).unwrap())?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x = RealTensor::new(vec![4, 8], (0..32).map(|_| rng.gaussian()).collect()).unwrap();
        let z = linear.forward(&x)?;
        let back = linear.inverse(&z.values)?;
        worst = worst.max(max_abs_diff(back.data(), x.data()));
    }
    checks.push(Check::at_most("linear_roundtrip", worst, 1e-10));

    let stl = TransformSpec::seasonal_trend(64, 8)?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x: Vec<f64> = (0..64).map(|_| rng.uniform(-3.0, 3.0)).collect();
        let xt = RealTensor::vector(&x).unwrap();
        let z = stl.forward(&xt)?;
        let back = stl.inverse(&z.values)?;
        worst = worst.max(max_abs_diff(back.data(), &x));
    }
    checks.push(Check::at_most("seasonal_trend_roundtrip", worst, 1e-12));
    Ok(())
}

fn gradient_checks(checks: &mut Vec<Check>, seed: u64) -> Result<(), CliError> {
    let cfg = SynthConfig::default();
    let mut worst_fd: f64 = 0.0;
    let mut worst_sym: f64 = 0.0;
    for i in 0..20 {
        let (graph, bindings) = random_smooth_graph(seed.wrapping_add(i), &cfg);
        worst_fd = worst_fd.max(finite_difference_check(&graph, &bindings, 1e-4)?);
        let (_, grads) = backward(&graph, &bindings)?;
        worst_sym = worst_sym.max(grads.conjugate_symmetry_residual());
    }
    checks.push(Check::at_most("gradient_finite_difference", worst_fd, 1e-5));
    checks.push(Check::at_most("conjugate_symmetry", worst_sym, 1e-12));
    Ok(())
}

fn engine_checks(checks: &mut Vec<Check>, seed: u64) -> Result<(), CliError> {
    let n = 16;
    let mut worst_eq: f64 = 0.0;
    let mut worst_ident: f64 = 0.0;
    for i in 0..5u64 {
        let model = random_real_model(seed ^ (0x1000 + i), n);
        let x = random_real_input(seed ^ (0x2000 + i), n);

        let dft = TransformSpec::dft(n, 8.0);
        let path = PathSpec::zero_baseline(&dft, &[n], 16, Rule::RightRiemann)?;
        let a = attribute(&model, &dft, &x, &path, Algorithm::ComplexSplit)?;
        let b = attribute(&model, &dft, &x, &path, Algorithm::ComplexWirtinger)?;
        worst_eq = worst_eq.max(max_abs_diff(&a.scores, &b.scores));

        // classic formula assembled outside the engine
        let ident = TransformSpec::identity(n);
        let path = PathSpec::zero_baseline(&ident, &[n], 32, Rule::RightRiemann)?;
        let engine = attribute(&model, &ident, &x, &path, Algorithm::Real)?;
        let m = 32;
        let mut avg = vec![0.0; n];
        for s in 1..=m {
            let t = s as f64 / m as f64;
            let point: Vec<f64> = x.data().iter().map(|&v| t * v).collect();
            let bind = Bindings::new().bind(0, RealTensor::vector(&point).unwrap());
            let (_, grads) = backward(&model, &bind)?;
            for (acc, g) in avg.iter_mut().zip(grads.real(0).iter()) {
                *acc += g / m as f64;
            }
        }
        let classic: Vec<f64> = x
            .data()
            .iter()
            .zip(avg.iter())
            .map(|(v, g)| v * g)
            .collect();
        worst_ident = worst_ident.max(max_abs_diff(&engine.scores, &classic));
    }
    checks.push(Check::at_most("algorithm_equivalence", worst_eq, 1e-8));
    checks.push(Check::at_most("identity_reduction", worst_ident, 1e-9));
    Ok(())
}

fn model_checks(
    checks: &mut Vec<Check>,
    model: &ModelSpec,
    steps: usize,
    seed: u64,
) -> Result<(), CliError> {
    // completeness on the provided model: holds for any weights, degrades
    // only with too-coarse quadrature
    let mut spec = DatasetSpec::two_class_default(seed ^ 0xC0);
    if let DatasetSpec::TwoClassSinusoid { fs, n, .. } = &mut spec {
        *fs = model.fs;
        *n = model.n;
    }
    let corpus = generate_two_class(&spec, 10);
    let dft = TransformSpec::dft(model.n, model.fs);
    let output_dim = model.output_dim()?;
    let mut worst_rel: f64 = 0.0;
    for (x, label) in &corpus {
        let graph = model.with_output((*label).min(output_dim - 1)).compile()?;
        let path = PathSpec::zero_baseline(&dft, &[model.n], steps, Rule::RightRiemann)?;
        let r = attribute(&graph, &dft, x, &path, Algorithm::ComplexWirtinger)?;
        let denom = (r.f_input - r.f_baseline).abs().max(1.0);
        worst_rel = worst_rel.max(r.completeness_residual.abs() / denom);
    }
    checks.push(Check::at_most("completeness_relative", worst_rel, 1e-2));

    // design checks need the conv front end
    let Some(Layer::Conv1d { kernels }) = model.layers.first() else {
        return Ok(());
    };

    // closed-form fidelity of channel 0 on a bin-aligned passband sinusoid
    let kernel = &kernels[0];
    let single = ModelSpec::single_channel(model.fs, kernel.clone(), model.n);
    let graph = single.compile()?;
    let bin = (model.n as f64 / model.fs).round().max(1.0); // nearest bin to 1 Hz
    let xi = bin * model.fs / model.n as f64;
    let mut worst_eq7: f64 = 0.0;
    for phi in [0.0, std::f64::consts::FRAC_PI_3] {
        let x: Vec<f64> = (0..model.n)
            .map(|m| (std::f64::consts::TAU * xi * m as f64 / model.fs + phi).cos())
            .collect();
        let bind = Bindings::new().bind(0, RealTensor::vector(&x).unwrap());
        let got = xdig::forward_eval(&graph, &bind)?;
        let want = analytic_sinusoid_output(1.0, frequency_response(kernel, xi, model.fs));
        if want.abs() > 1e-9 {
            worst_eq7 = worst_eq7.max((got - want).abs() / want.abs());
        }
    }
    checks.push(Check::at_most("closed_form_fidelity", worst_eq7, 0.05));

    checks.push(Check::at_least(
        "channel1_passband_gain",
        frequency_response(&kernels[0], 1.0, model.fs),
        0.98,
    ));
    checks.push(Check::at_most(
        "channel1_stopband_gain",
        frequency_response(&kernels[0], 4.0, model.fs),
        0.05,
    ));
    if kernels.len() > 1 {
        checks.push(Check::at_least(
            "channel2_passband_gain",
            frequency_response(&kernels[1], 4.0, model.fs),
            0.98,
        ));
        checks.push(Check::at_most(
            "channel2_stopband_gain",
            frequency_response(&kernels[1], 1.0, model.fs),
            0.05,
        ));
    }
    Ok(())
}

fn builtin_checks(checks: &mut Vec<Check>, seed: u64) -> Result<(), CliError> {
    // the reference classifier itself, independent of --model
    let classifier = ModelSpec::sinusoid_classifier_default();
    let corpus = generate_two_class(&DatasetSpec::two_class_default(seed ^ 0xACC), 200);
    let mut correct = 0;
    for (x, label) in &corpus {
        if classifier.classify(x)? == *label {
            correct += 1;
        }
    }
    checks.push(Check::at_least(
        "classifier_accuracy",
        correct as f64 / corpus.len() as f64,
        0.98,
    ));

    // blind source recovery at the reference configuration
    let mut rng = xdig::rng::XorShift64Star::new(seed ^ 0x1CA);
    let m = 2000;
    let a_true = DenseMatrix::new(2, 2, vec![2.0, 1.0, 1.0, 1.0]).unwrap();
    let s: Vec<f64> = (0..2 * m)
        .map(|_| rng.uniform(-(3.0f64.sqrt()), 3.0f64.sqrt()))
        .collect();
    let mut x = vec![0.0; 2 * m];
    for t in 0..m {
        x[t] = a_true.get(0, 0) * s[t] + a_true.get(0, 1) * s[m + t];
        x[m + t] = a_true.get(1, 0) * s[t] + a_true.get(1, 1) * s[m + t];
    }
    let data = RealTensor::new(vec![2, m], x).unwrap();
    let fitted = fit_fastica(&data, 2, 30000, 1e-8, seed)?;
    let TransformSpec::Linear { w, .. } = &fitted else {
        unreachable!("fastica returns the linear kind")
    };
    let p = DenseMatrix::from_nalgebra(&(w.to_nalgebra() * a_true.to_nalgebra()));
    checks.push(Check::at_most(
        "fastica_recovery_amari",
        amari_index(&p),
        0.05,
    ));
    Ok(())
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
