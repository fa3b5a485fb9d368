//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use otbag::data::write_dense_csv;
use otbag::ensemble::{
    load_model, save_model, train_jdsmv, train_otbag, train_sdmv, AccuracyLedger, EnsembleConfig,
    Model, Segmentation,
};
use otbag::harness::{
    make_synthetic_task, run_experiment, Algorithm, ExperimentConfig, SynthKind, SyntheticSpec,
    TaskSpec,
};
use otbag::sampling::{binomial_pmf, ConstantDraws, ScriptedDraws};
use otbag::{
    majority_vote, Classifier, DomainTag, FeatureVector, Label, LearnerKind, PoissonSource,
    SeededRng, TaggedInstance, WeakLearner,
};

type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!("{} [{:.3}s, limit {}s]", out.detail, elapsed.as_secs_f64(), limit.as_secs());
    out.passed &= elapsed < limit;
    out
}

fn factorial(k: u64) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn poisson_limit() -> Outcome {
    let gap = (0..=10u64)
        .map(|k| {
            let oracle = (-1.0f64).exp() / factorial(k);
            (binomial_pmf(10_000, k).unwrap() - oracle).abs()
        })
        .fold(0.0, f64::max);
    outcome(gap < 1e-4, format!("max |binomial - poisson| = {gap:.3e}"))
}

fn sampler_statistics() -> Outcome {
    // 0.999 quantile of chi-square with 4 degrees of freedom.
    const CHI2_4_CRITICAL: f64 = 18.4668;
    let n = 100_000usize;
    let mut rng = SeededRng::new(2024);
    let mut bins = [0usize; 5];
    let mut total = 0u64;
    for _ in 0..n {
        let k = rng.draw();
        total += u64::from(k);
        bins[(k as usize).min(4)] += 1;
    }
    let mean = total as f64 / n as f64;
    let p0 = bins[0] as f64 / n as f64;
    let e = (-1.0f64).exp();
    let mut probs: Vec<f64> = (0..4u64).map(|k| e / factorial(k)).collect();
    probs.push(1.0 - probs.iter().sum::<f64>());
    let stat: f64 = bins
        .iter()
        .zip(&probs)
        .map(|(&o, &p)| (o as f64 - p * n as f64).powi(2) / (p * n as f64))
        .sum();
    outcome(
        (0.99..=1.01).contains(&mean) && (0.357..=0.379).contains(&p0) && stat < CHI2_4_CRITICAL,
        format!("mean {mean:.4}, freq(0) {p0:.4}, chi2 {stat:.3} (critical {CHI2_4_CRITICAL})"),
    )
}

fn random_point(rng: &mut SeededRng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.uniform() * 4.0 - 2.0).collect()
}

fn degenerate_ensemble() -> Outcome {
    let d = 4;
    let mut rng = SeededRng::new(7);
    let stream: Vec<TaggedInstance> = (0..300)
        .map(|i| {
            let x = random_point(&mut rng, d);
            let y = Label::from_bool(x[0] - 0.7 * x[2] + 0.2 > 0.0);
            let domain = if i % 4 == 0 { DomainTag::Target } else { DomainTag::Source };
            TaggedInstance::new(FeatureVector::dense(x).unwrap(), y, domain)
        })
        .collect();
    let config = EnsembleConfig::new(1, LearnerKind::Perceptron);
    let model = train_otbag(&stream, &config, &mut ConstantDraws(1)).unwrap();

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let score = |w: &[f64], b: f64, x: &[f64]| w.iter().zip(x).map(|(a, c)| a * c).sum::<f64>() + b;
    for inst in &stream {
        let x = inst.x.to_dense();
        let pred = score(&w, b, &x) > 0.0;
        let truth = inst.y == Label::One;
        if pred != truth {
            let s = if truth { 1.0 } else { -1.0 };
            for (wi, xi) in w.iter_mut().zip(&x) {
                *wi += s * xi;
            }
            b += s;
        }
    }
    let agree = (0..100)
        .filter(|_| {
            let x = random_point(&mut rng, d);
            let oracle = Label::from_bool(score(&w, b, &x) > 0.0);
            model.predict(&FeatureVector::dense(x).unwrap()).unwrap() == oracle
        })
        .count();
    outcome(agree == 100, format!("{agree}/100 test points agree"))
}

fn vote_oracle() -> Outcome {
    let mut cases = 0;
    let mut mismatches = 0;
    for len in 1..=5u32 {
        for bits in 0..(1u32 << len) {
            let votes: Vec<Label> = (0..len).map(|i| Label::from_bool(bits >> i & 1 == 1)).collect();
            let ones = votes.iter().filter(|&&v| v == Label::One).count();
            let zeros = votes.len() - ones;
            let oracle = if ones > zeros { Label::One } else { Label::Zero };
            if majority_vote(votes).unwrap() != oracle {
                mismatches += 1;
            }
            cases += 1;
        }
    }
    outcome(cases == 62 && mismatches == 0, format!("{cases} vote lists, {mismatches} mismatches"))
}

fn inst(x: [f64; 2], y: u8, domain: DomainTag) -> TaggedInstance {
    TaggedInstance::new(FeatureVector::dense(x.to_vec()).unwrap(), Label::try_from(y).unwrap(), domain)
}

fn perceptron(w: [f64; 2], b: f64) -> WeakLearner {
    WeakLearner::from_parts(LearnerKind::Perceptron, w.to_vec(), b).unwrap()
}

fn ledger(acc_h: [u64; 2], acc_f: u64, n: u64) -> AccuracyLedger {
    AccuracyLedger {
        acc_h: acc_h.to_vec(),
        acc_f,
        n_target_seen: n,
    }
}

/// Worked by hand with zero-initialised perceptrons and F-vote ties going to 0:
///
/// | n | domain | x       | y | draws | h1 / h2 / F correct | h1 after   | f1 after  |
/// |---|--------|---------|---|-------|---------------------|------------|-----------|
/// | 1 | T      | (1, 0)  | 1 | 1, 0  | no / no / no        | (1,0; 1)   | (1,0; 1)  |
/// | 2 | S      | (0, 1)  | 0 | 1, 0  | -                   | (1,-1; 0)  | (1,0; 1)  |
/// | 3 | T      | (1, 0)  | 0 | 1, 1  | no / yes / yes      | (0,-1; -1) | (0,0; 0)  |
/// | 4 | T      | (0, 1)  | 0 | 2, 1  | yes / yes / yes     | (0,-1; -1) | (0,0; 0)  |
///
/// h2 and f2 never make a mistake when updated and stay at zero.
fn hand_trace() -> Outcome {
    let stream = vec![
        inst([1.0, 0.0], 1, DomainTag::Target),
        inst([0.0, 1.0], 0, DomainTag::Source),
        inst([1.0, 0.0], 0, DomainTag::Target),
        inst([0.0, 1.0], 0, DomainTag::Target),
    ];
    let script = vec![1, 0, 1, 0, 1, 1, 2, 1];
    let config = EnsembleConfig::new(2, LearnerKind::Perceptron);
    let h = vec![perceptron([0.0, -1.0], -1.0), perceptron([0.0, 0.0], 0.0)];
    let f = vec![perceptron([0.0, 0.0], 0.0), perceptron([0.0, 0.0], 0.0)];
    let mut failures = Vec::new();

    let mut draws = ScriptedDraws::new(script.clone());
    let sdmv = train_sdmv(&stream, &config, &mut draws).unwrap();
    if draws.consumed() != 8 {
        failures.push(format!("sdmv consumed {} draws", draws.consumed()));
    }
    if *sdmv.dual().ledger() != ledger([1, 2], 2, 3) {
        failures.push(format!("sdmv ledger {:?}", sdmv.dual().ledger()));
    }
    if sdmv.surviving() != [1] {
        failures.push(format!("H* = {:?}", sdmv.surviving()));
    }
    if sdmv.dual().h_members() != h.as_slice() || sdmv.dual().f_members() != f.as_slice() {
        failures.push("sdmv weights".into());
    }

    // Two segments of two instances.
    let jd = train_jdsmv(&stream, &config, Segmentation::Count(2), &mut ScriptedDraws::new(script.clone())).unwrap();
    let segs = jd.segments();
    if segs.sets != vec![vec![1]] {
        failures.push(format!("zeta (2 segments) = {:?}", segs.sets));
    }
    if segs.ledgers != vec![ledger([0, 0], 0, 1), ledger([1, 2], 2, 2)] {
        failures.push(format!("segment ledgers {:?}", segs.ledgers));
    }
    if jd.dual().h_members() != h.as_slice() || jd.dual().f_members() != f.as_slice() {
        failures.push("jdsmv weights".into());
    }

    // One instance per segment: segment 2 holds only the source instance.
    let jd = train_jdsmv(&stream, &config, Segmentation::Length(1), &mut ScriptedDraws::new(script)).unwrap();
    if jd.segments().sets != vec![vec![], vec![1], vec![0, 1]] {
        failures.push(format!("zeta (4 segments) = {:?}", jd.segments().sets));
    }

    let detail = if failures.is_empty() {
        "ledger [1,2]/2 of 3, H* = {1}, zeta = [{1}] and [{}, {1}, {0,1}]".to_string()
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

fn synthetic(kind: SynthKind, algorithms: Vec<Algorithm>) -> ExperimentConfig {
    ExperimentConfig {
        task: TaskSpec::Synthetic(SyntheticSpec {
            kind,
            dimension: 10,
            n_source: 1000,
            n_target: 40,
            n_test: 1000,
            separation: 4.0,
        }),
        repetitions: 20,
        algorithms,
        ..Default::default()
    }
}

fn mean_of(table: &otbag::harness::ResultTable, algo: Algorithm) -> f64 {
    let accs = &table.by_algorithm(algo).unwrap().accuracies;
    accs.iter().sum::<f64>() / accs.len() as f64
}

fn positive_transfer() -> Outcome {
    let table = run_experiment(&synthetic(SynthKind::Aligned, vec![Algorithm::OtBag, Algorithm::TargetOnly])).unwrap();
    let otbag = mean_of(&table, Algorithm::OtBag);
    let base = mean_of(&table, Algorithm::TargetOnly);
    outcome(
        otbag >= base + 0.03 && otbag >= 0.85,
        format!(
            "otbag {:.2}%, target-only {:.2}%, gain {:+.2} pp (need >= +3.00)",
            otbag * 100.0,
            base * 100.0,
            (otbag - base) * 100.0
        ),
    )
}

fn negative_transfer() -> Outcome {
    let table = run_experiment(&synthetic(SynthKind::Flipped, Algorithm::PAPER_SET.to_vec())).unwrap();
    let otbag = mean_of(&table, Algorithm::OtBag);
    let sdmv = mean_of(&table, Algorithm::Sdmv);
    let jdsmv = mean_of(&table, Algorithm::Jdsmv);
    outcome(
        jdsmv >= otbag + 0.05 && sdmv >= otbag,
        format!(
            "otbag {:.2}%, sdmv {:.2}%, jdsmv {:.2}%",
            otbag * 100.0,
            sdmv * 100.0,
            jdsmv * 100.0
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = SyntheticSpec {
        kind: SynthKind::Flipped,
        n_source: 400,
        n_target: 100,
        ..Default::default()
    };
    let task = make_synthetic_task(&spec, 9).unwrap();
    let source = dir.path().join("source.csv");
    let target = dir.path().join("target.csv");
    write_dense_csv(&task.source, &source).unwrap();
    write_dense_csv(&task.target_train, &target).unwrap();
    let invoke = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_otbag"))
            .arg("run")
            .arg("--source")
            .arg(&source)
            .arg("--target")
            .arg(&target)
            .args(["--format", "csv", "--reps", "5", "--seed", "3", "--report", "json", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        (status.success(), std::fs::read(out).unwrap_or_default())
    };
    let (ok_a, a) = invoke("a.json");
    let (ok_b, b) = invoke("b.json");
    outcome(
        ok_a && ok_b && !a.is_empty() && a == b,
        format!("{} and {} byte reports", a.len(), b.len()),
    )
}

fn gradient_check() -> Outcome {
    let mut rng = SeededRng::new(99);
    let lr = 0.05;
    let h = 1e-6;
    let mut worst = 0.0f64;
    for case in 0..100 {
        let d = 1 + case % 5;
        let w: Vec<f64> = (0..d).map(|_| rng.uniform() * 2.0 - 1.0).collect();
        let x: Vec<f64> = (0..d).map(|_| rng.uniform() * 2.0 - 1.0).collect();
        let b = rng.uniform() - 0.5;
        let y = if rng.uniform() < 0.5 { 0.0 } else { 1.0 };
        let loss = |w: &[f64], b: f64| {
            let z: f64 = w.iter().zip(&x).map(|(a, c)| a * c).sum::<f64>() + b;
            let p = 1.0 / (1.0 + (-z).exp());
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        };
        let mut learner = WeakLearner::from_parts(LearnerKind::Logistic { learning_rate: lr }, w.clone(), b).unwrap();
        learner
            .update(&FeatureVector::dense(x.clone()).unwrap(), Label::from_bool(y == 1.0))
            .unwrap();
        let mut params: Vec<(f64, f64)> = (0..d)
            .map(|i| {
                let mut up = w.clone();
                let mut down = w.clone();
                up[i] += h;
                down[i] -= h;
                let fd = (loss(&up, b) - loss(&down, b)) / (2.0 * h);
                (-(learner.weights()[i] - w[i]) / lr, fd)
            })
            .collect();
        let fd_b = (loss(&w, b + h) - loss(&w, b - h)) / (2.0 * h);
        params.push((-(learner.bias() - b) / lr, fd_b));
        for (step, fd) in params {
            if fd.abs() > 1e-8 {
                worst = worst.max(((step - fd) / fd).abs());
            }
        }
    }
    outcome(worst < 1e-5, format!("worst relative error {worst:.3e} over 100 cases"))
}

fn serialization() -> Outcome {
    let d = 5;
    let mut rng = SeededRng::new(31);
    let stream: Vec<TaggedInstance> = (0..240)
        .map(|i| {
            let x = random_point(&mut rng, d);
            let target_concept = x[0] + x[1] > 0.0;
            let domain = if i % 3 == 0 { DomainTag::Target } else { DomainTag::Source };
            let y = if domain == DomainTag::Target { target_concept } else { x[1] - x[3] > 0.3 };
            TaggedInstance::new(FeatureVector::dense(x).unwrap(), Label::from_bool(y), domain)
        })
        .collect();
    let config = EnsembleConfig::new(7, LearnerKind::logistic());
    let models: Vec<Model> = vec![
        train_otbag(&stream, &config, &mut SeededRng::new(1)).unwrap().into(),
        train_sdmv(&stream, &config, &mut SeededRng::new(2)).unwrap().into(),
        train_jdsmv(&stream, &config, Segmentation::Count(4), &mut SeededRng::new(3)).unwrap().into(),
    ];
    let dir = tempfile::tempdir().unwrap();
    let probes: Vec<FeatureVector> = (0..1000)
        .map(|_| FeatureVector::dense(random_point(&mut rng, d)).unwrap())
        .collect();
    let mut details = Vec::new();
    let mut passed = true;
    for (i, model) in models.iter().enumerate() {
        let path = dir.path().join(format!("m{i}.model"));
        save_model(model, &path).unwrap();
        let back = load_model(&path).unwrap();
        let same = probes
            .iter()
            .filter(|x| back.predict(x).unwrap() == model.predict(x).unwrap())
            .count();
        passed &= same == probes.len() && back == *model;
        details.push(format!("{} {same}/1000", model.algorithm_name()));
    }
    outcome(passed, details.join(", "))
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria: Vec<Criterion> = vec![
        ("poisson limit", secs(1), poisson_limit),
        ("sampler statistics", secs(2), sampler_statistics),
        ("degenerate ensemble", secs(1), degenerate_ensemble),
        ("vote oracle", secs(1), vote_oracle),
        ("hand trace", secs(1), hand_trace),
        ("positive transfer", secs(10), positive_transfer),
        ("negative transfer", secs(15), negative_transfer),
        ("determinism", secs(10), determinism),
        ("gradient check", secs(1), gradient_check),
        ("serialization", secs(2), serialization),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let out = timed(limit, check);
        if !out.passed {
            failed += 1;
        }
        let status = if out.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status} {name}: {}", i + 1, out.detail);
    }
    println!("{failed} of 10 criteria failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
