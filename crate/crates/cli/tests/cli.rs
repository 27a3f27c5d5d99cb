//! End-to-end command behavior through the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use xdig::matrix::DenseMatrix;
use xdig::models::{design_fir, FilterKind, Layer, ModelSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_xdig"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn xdig")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("xdig-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_scores(path: &Path) -> Vec<(String, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .filter_map(|l| {
            let (label, score) = l.split_once(',').unwrap();
            // drop the column-name row
            score.parse().ok().map(|s| (label.to_string(), s))
        })
        .collect()
}

#[test]
fn synth_is_deterministic_per_seed() {
    let dir = tmpdir("synth");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    let c = dir.join("c.csv");
    assert_ok(&run(&[
        "synth",
        "--count",
        "20",
        "--seed",
        "7",
        "--out",
        a.to_str().unwrap(),
    ]));
    assert_ok(&run(&[
        "synth",
        "--count",
        "20",
        "--seed",
        "7",
        "--out",
        b.to_str().unwrap(),
    ]));
    assert_ok(&run(&[
        "synth",
        "--count",
        "20",
        "--seed",
        "8",
        "--out",
        c.to_str().unwrap(),
    ]));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn explain_dataset_row_finds_class_frequency() {
    let dir = tmpdir("explain");
    let data = dir.join("data.csv");
    let model = dir.join("model.json");
    xdig::models::save_model(&ModelSpec::sinusoid_classifier_default(), &model).unwrap();
    assert_ok(&run(&[
        "synth",
        "--count",
        "4",
        "--seed",
        "3",
        "--out",
        data.to_str().unwrap(),
    ]));

    let out = dir.join("scores");
    let res = run(&[
        "explain",
        "--model",
        model.to_str().unwrap(),
        "--signal",
        data.to_str().unwrap(),
        "--row",
        "0",
        "--transform",
        "dft",
        "--steps",
        "256",
        "--out",
        out.to_str().unwrap(),
        "--format",
        "csv,json,svg",
    ]);
    assert_ok(&res);
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("completeness residual"), "{stderr}");

    let scores = read_scores(&dir.join("scores.csv"));
    let best = scores
        .iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    assert_eq!(best.0, "1.00Hz", "row 0 is a class-1 (1 Hz) sample");

    assert!(dir.join("scores.json").exists());
    assert!(dir.join("scores.svg").exists());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("scores.json")).unwrap()).unwrap();
    assert_eq!(doc["version"], 1);
    assert!(doc["config"].as_str().unwrap().len() == 16);
    assert_eq!(doc["result"]["algorithm"], "complex_wirtinger");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn explain_output_flag_selects_channel() {
    let dir = tmpdir("output");
    let data = dir.join("data.csv");
    let model = dir.join("model.json");
    xdig::models::save_model(&ModelSpec::sinusoid_classifier_default(), &model).unwrap();
    assert_ok(&run(&[
        "synth",
        "--count",
        "4",
        "--seed",
        "3",
        "--out",
        data.to_str().unwrap(),
    ]));
    // row 1 is a class-2 (~4 Hz) sample; explain its highpass channel
    let out = dir.join("ch2");
    assert_ok(&run(&[
        "explain",
        "--model",
        model.to_str().unwrap(),
        "--signal",
        data.to_str().unwrap(),
        "--row",
        "1",
        "--output",
        "1",
        "--steps",
        "128",
        "--out",
        out.to_str().unwrap(),
    ]));
    let scores = read_scores(&dir.join("ch2.csv"));
    let best = scores
        .iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    let hz: f64 = best.0.trim_end_matches("Hz").parse().unwrap();
    assert!(
        (hz - 4.0).abs() <= 1.5,
        "peak at {hz} Hz, expected near 4 Hz"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn explain_keep_all_baseline_zeroes_scores() {
    let dir = tmpdir("keepall");
    let data = dir.join("data.csv");
    let model = dir.join("model.json");
    xdig::models::save_model(&ModelSpec::sinusoid_classifier_default(), &model).unwrap();
    assert_ok(&run(&[
        "synth",
        "--count",
        "2",
        "--seed",
        "5",
        "--out",
        data.to_str().unwrap(),
    ]));
    let out = dir.join("zeros");
    assert_ok(&run(&[
        "explain",
        "--model",
        model.to_str().unwrap(),
        "--signal",
        data.to_str().unwrap(),
        "--row",
        "1",
        "--baseline",
        "filtered:0-127",
        "--steps",
        "8",
        "--out",
        out.to_str().unwrap(),
    ]));
    // one-sided spectral view: DC + 63 pairs + Nyquist
    let scores = read_scores(&dir.join("zeros.csv"));
    assert_eq!(scores.len(), 65);
    assert!(scores.iter().all(|(_, s)| *s == 0.0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn explain_missing_model_exits_2_naming_path() {
    let dir = tmpdir("missing");
    let data = dir.join("data.csv");
    assert_ok(&run(&[
        "synth",
        "--count",
        "2",
        "--seed",
        "1",
        "--out",
        data.to_str().unwrap(),
    ]));
    let res = run(&[
        "explain",
        "--model",
        "does-not-exist.json",
        "--signal",
        data.to_str().unwrap(),
        "--row",
        "0",
        "--out",
        dir.join("x").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("does-not-exist.json"), "{stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn explain_dataset_without_row_exits_2() {
    let dir = tmpdir("norow");
    let data = dir.join("data.csv");
    let model = dir.join("model.json");
    xdig::models::save_model(&ModelSpec::sinusoid_classifier_default(), &model).unwrap();
    assert_ok(&run(&[
        "synth",
        "--count",
        "2",
        "--seed",
        "1",
        "--out",
        data.to_str().unwrap(),
    ]));
    let res = run(&[
        "explain",
        "--model",
        model.to_str().unwrap(),
        "--signal",
        data.to_str().unwrap(),
        "--out",
        dir.join("x").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("--row"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn explain_seasonal_trend_against_trend_dataset() {
    let dir = tmpdir("stl");
    let data = dir.join("trend.csv");
    assert_ok(&run(&[
        "synth",
        "--kind",
        "trend_seasonal",
        "--count",
        "2",
        "--seed",
        "4",
        "--horizon",
        "0",
        "--out",
        data.to_str().unwrap(),
    ]));
    // mean-pooling model over the 512-point window
    let model_path = dir.join("mean.json");
    let model = ModelSpec::new(
        64.0,
        512,
        vec![Layer::Dense {
            weights: DenseMatrix::new(1, 512, vec![1.0 / 512.0; 512]).unwrap(),
            bias: vec![0.0],
        }],
    );
    xdig::models::save_model(&model, &model_path).unwrap();
    let out = dir.join("stl_scores");
    assert_ok(&run(&[
        "explain",
        "--model",
        model_path.to_str().unwrap(),
        "--signal",
        data.to_str().unwrap(),
        "--row",
        "0",
        "--transform",
        "seasonal_trend:period=32",
        "--steps",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]));
    let scores = read_scores(&dir.join("stl_scores.csv"));
    assert_eq!(scores.len(), 3 * 512);
    assert_eq!(scores[0].0, "trend");
    assert_eq!(scores[512].0, "seasonal");
    // trend dominates the mean of an exponential-plus-seasonal series
    let trend_total: f64 = scores[..512].iter().map(|(_, s)| s).sum();
    let seasonal_total: f64 = scores[512..1024].iter().map(|(_, s)| s).sum();
    assert!(trend_total > seasonal_total.abs());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validate_default_passes() {
    let res = run(&["validate"]);
    assert_ok(&res);
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout
        .lines()
        .all(|l| l.is_empty() || l.starts_with("PASS")));
}

#[test]
fn validate_corrupted_weights_fails_design_checks_only() {
    let dir = tmpdir("corrupt");
    let mut model = ModelSpec::sinusoid_classifier_default();
    if let Layer::Conv1d { kernels } = &mut model.layers[0] {
        // heavy mass at the kernel edges wrecks the same-padding closed
        // form without touching the axioms
        kernels[0][0] += 2.0;
        kernels[0][64] -= 1.5;
    }
    let path = dir.join("corrupt.json");
    xdig::models::save_model(&model, &path).unwrap();
    let res = run(&[
        "validate",
        "--model",
        path.to_str().unwrap(),
        "--steps",
        "128",
    ]);
    assert_eq!(res.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&res.stdout);
    // the axiom holds for any weights; the design checks catch the damage
    assert!(stdout.contains("PASS completeness_relative"), "{stdout}");
    assert!(stdout.contains("FAIL closed_form_fidelity"), "{stdout}");
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("closed_form_fidelity"), "{stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

/// conv -> relu -> pool -> dense(bias) -> relu: the bias moves the second
/// kink into the interior of the integration path, so one-step quadrature
/// cannot satisfy completeness.
fn kinked_model() -> ModelSpec {
    let lowpass = design_fir(FilterKind::Lowpass, 2.5, 32.0, 65).unwrap();
    ModelSpec::new(
        32.0,
        128,
        vec![
            Layer::Conv1d {
                kernels: vec![lowpass],
            },
            Layer::Relu,
            Layer::GlobalAvgPool,
            Layer::Dense {
                weights: DenseMatrix::new(1, 1, vec![2.0]).unwrap(),
                bias: vec![-0.3],
            },
            Layer::Relu,
        ],
    )
}

#[test]
fn validate_one_step_quadrature_fails_completeness() {
    let dir = tmpdir("onestep");
    let path = dir.join("kinked.json");
    xdig::models::save_model(&kinked_model(), &path).unwrap();

    let res = run(&[
        "validate",
        "--model",
        path.to_str().unwrap(),
        "--steps",
        "1",
    ]);
    assert_eq!(res.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("FAIL completeness_relative"), "{stdout}");
    assert!(
        String::from_utf8_lossy(&res.stderr).contains("completeness_relative"),
        "failure report names the check"
    );

    // fine quadrature brings the same model back under tolerance
    let res = run(&[
        "validate",
        "--model",
        path.to_str().unwrap(),
        "--steps",
        "1024",
    ]);
    assert_ok(&res);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eval_k100_deletion_arms_agree() {
    let dir = tmpdir("eval100");
    let out = dir.join("curve");
    assert_ok(&run(&[
        "eval",
        "--count",
        "4",
        "--trials",
        "3",
        "--steps",
        "16",
        "--k",
        "100",
        "--seed",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("curve.json")).unwrap()).unwrap();
    let rows = report["report"]["rows"].as_array().unwrap();
    let dist = |method: &str| -> f64 {
        rows.iter()
            .find(|r| r["mode"] == "deletion" && r["method"] == method)
            .unwrap()["mean_distance"]
            .as_f64()
            .unwrap()
    };
    assert!((dist("ig_ranked") - dist("random")).abs() < 1e-12);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn demo_reports_sweep_correlation() {
    let dir = tmpdir("demo");
    let res = run(&[
        "demo",
        "--out",
        dir.to_str().unwrap(),
        "--steps",
        "32",
        "--seed",
        "1",
        "--format",
        "csv,svg",
    ]);
    assert_ok(&res);
    let stdout = String::from_utf8_lossy(&res.stdout);
    for channel in 1..=2 {
        let line = stdout
            .lines()
            .find(|l| l.starts_with(&format!("channel {channel}")))
            .unwrap_or_else(|| panic!("no correlation line for channel {channel}: {stdout}"));
        let r: f64 = line.rsplit('=').next().unwrap().trim().parse().unwrap();
        assert!(r >= 0.99, "channel {channel}: r={r}");
    }
    for file in [
        "model.json",
        "class1.csv",
        "class2.csv",
        "class1_time_ig.csv",
        "class1_freq_ig.csv",
        "class2_time_ig.csv",
        "class2_freq_ig.csv",
        "sweep.csv",
        "sweep.svg",
    ] {
        assert!(dir.join(file).exists(), "{file} missing");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn explain_component_domain_end_to_end() {
    use xdig::rng::XorShift64Star;
    use xdig::transforms::fit_fastica;
    use xdig::RealTensor;

    let dir = tmpdir("ica");
    // two uniform sources mixed by a fixed matrix
    let m = 2000usize;
    let mut rng = XorShift64Star::new(55);
    let half_width = 3.0f64.sqrt();
    let s: Vec<f64> = (0..2 * m)
        .map(|_| rng.uniform(-half_width, half_width))
        .collect();
    let mut mixed = vec![0.0; 2 * m];
    for t in 0..m {
        mixed[t] = 2.0 * s[t] + s[m + t];
        mixed[m + t] = s[t] + s[m + t];
    }
    let data = RealTensor::new(vec![2, m], mixed).unwrap();
    let fitted = fit_fastica(&data, 2, 30000, 1e-8, 9).unwrap();
    let tpath = dir.join("ica.json");
    std::fs::write(&tpath, fitted.to_json()).unwrap();

    // a short window of the mixture as the signal under explanation
    let n = 64usize;
    let mut window = vec![0.0; 2 * n];
    window[..n].copy_from_slice(&data.data()[..n]);
    window[n..].copy_from_slice(&data.data()[m..m + n]);
    let signal = RealTensor::new(vec![2, n], window).unwrap();
    let spath = dir.join("signal.csv");
    let mut text = String::from("# fs=32 n=64\n");
    for t in 0..n {
        text.push_str(&format!("{},{}\n", signal.data()[t], signal.data()[n + t]));
    }
    std::fs::write(&spath, text).unwrap();

    // dense read-out over the flattened multichannel window
    let model = xdig::ModelSpec::multichannel(
        32.0,
        2,
        n,
        vec![xdig::models::Layer::Dense {
            weights: DenseMatrix::new(1, 2 * n, vec![1.0 / (2.0 * n as f64); 2 * n]).unwrap(),
            bias: vec![0.0],
        }],
    );
    let mpath = dir.join("dense.json");
    xdig::models::save_model(&model, &mpath).unwrap();

    let out = dir.join("components");
    assert_ok(&run(&[
        "explain",
        "--model",
        mpath.to_str().unwrap(),
        "--signal",
        spath.to_str().unwrap(),
        "--transform",
        tpath.to_str().unwrap(),
        "--steps",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]));

    // per-element scores plus the per-component totals
    let scores = read_scores(&dir.join("components.csv"));
    assert_eq!(scores.len(), 2 * n);
    assert!(scores.iter().take(n).all(|(l, _)| l == "c0"));
    let totals = read_scores(&dir.join("components.components.csv"));
    assert_eq!(totals.len(), 2);
    let sum_detail: f64 = scores.iter().map(|(_, s)| s).sum();
    let sum_totals: f64 = totals.iter().map(|(_, s)| s).sum();
    assert!((sum_detail - sum_totals).abs() < 1e-12);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn transform_file_roundtrip_through_explain() {
    let dir = tmpdir("tfile");
    let data = dir.join("data.csv");
    let model = dir.join("model.json");
    xdig::models::save_model(&ModelSpec::sinusoid_classifier_default(), &model).unwrap();
    assert_ok(&run(&[
        "synth",
        "--count",
        "2",
        "--seed",
        "9",
        "--out",
        data.to_str().unwrap(),
    ]));

    let tpath = dir.join("transform.json");
    std::fs::write(&tpath, xdig::TransformSpec::dft(128, 32.0).to_json()).unwrap();
    assert_ok(&run(&[
        "explain",
        "--model",
        model.to_str().unwrap(),
        "--signal",
        data.to_str().unwrap(),
        "--row",
        "0",
        "--transform",
        tpath.to_str().unwrap(),
        "--steps",
        "8",
        "--out",
        dir.join("out").to_str().unwrap(),
    ]));

    // a tampered inverse pair must be rejected at load time
    let lin = xdig::TransformSpec::linear(DenseMatrix::identity(2)).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&lin.to_json()).unwrap();
    doc["a"]["data"][1] = serde_json::json!(0.5);
    let bad = dir.join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let res = run(&[
        "explain",
        "--model",
        model.to_str().unwrap(),
        "--signal",
        data.to_str().unwrap(),
        "--row",
        "0",
        "--transform",
        bad.to_str().unwrap(),
        "--out",
        dir.join("nope").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}
