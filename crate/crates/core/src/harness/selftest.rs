//! Quick built-in checks run by `otbag selftest`.

use crate::domain::{DomainTag, FeatureVector, Label, TaggedInstance};
use crate::ensemble::{
    read_model, train_jdsmv, train_otbag, train_sdmv, write_model, EnsembleConfig, Model,
    Segmentation,
};
use crate::learners::{Classifier, LearnerKind, WeakLearner};
use crate::sampling::{binomial_pmf, poisson1_pmf, ConstantDraws, PoissonSource, SeededRng};
use crate::vote::majority_vote;

use super::{render_report, run_experiment, ExperimentConfig, ReportFormat, SyntheticSpec, TaskSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

fn poisson_limit() -> CheckOutcome {
    let gap = (0..=10)
        .map(|k| (binomial_pmf(10_000, k).unwrap_or(f64::NAN) - poisson1_pmf(k)).abs())
        .fold(0.0, f64::max);
    check("poisson_limit", gap < 1e-4, format!("max gap {gap:.3e}"))
}

/// Survival function of the chi-square distribution with 4 degrees of freedom.
fn chi2_sf_4(x: f64) -> f64 {
    (-x / 2.0).exp() * (1.0 + x / 2.0)
}

fn sampler_statistics() -> CheckOutcome {
    let n = 100_000;
    let mut rng = SeededRng::new(20);
    let mut bins = [0usize; 5];
    let mut sum = 0u64;
    for _ in 0..n {
        let k = rng.draw();
        sum += u64::from(k);
        bins[(k as usize).min(4)] += 1;
    }
    let mean = sum as f64 / n as f64;
    let p0 = bins[0] as f64 / n as f64;
    let probs: Vec<f64> = (0..4).map(poisson1_pmf).collect();
    let tail = 1.0 - probs.iter().sum::<f64>();
    let stat: f64 = bins
        .iter()
        .zip(probs.iter().chain(std::iter::once(&tail)))
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let p = chi2_sf_4(stat);
    check(
        "sampler_statistics",
        (0.99..=1.01).contains(&mean) && (0.357..=0.379).contains(&p0) && p > 0.001,
        format!("mean {mean:.4}, P(0) {p0:.4}, chi2 {stat:.2} (p = {p:.3})"),
    )
}

fn vote_exhaustive() -> CheckOutcome {
    let mut cases = 0;
    let mut ok = true;
    for len in 1..=5u32 {
        for bits in 0..(1u32 << len) {
            let votes: Vec<Label> = (0..len).map(|i| Label::from_bool(bits >> i & 1 == 1)).collect();
            let ones = bits.count_ones();
            let expected = Label::from_bool(ones > len - ones);
            ok &= majority_vote(votes).ok() == Some(expected);
            cases += 1;
        }
    }
    check("vote_exhaustive", ok, format!("{cases} vote lists"))
}

fn logistic_gradient() -> CheckOutcome {
    let mut rng = SeededRng::new(3);
    let lr = 0.1;
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let d = 1 + (rng.uniform() * 5.0) as usize % 5;
        let w: Vec<f64> = (0..d).map(|_| rng.uniform() * 2.0 - 1.0).collect();
        let x: Vec<f64> = (0..d).map(|_| rng.uniform() * 2.0 - 1.0).collect();
        let b = rng.uniform() - 0.5;
        let y = Label::from_bool(rng.uniform() < 0.5);
        let loss = |w: &[f64], b: f64| {
            let z: f64 = w.iter().zip(&x).map(|(a, c)| a * c).sum::<f64>() + b;
            let p = 1.0 / (1.0 + (-z).exp());
            -(y.as_f64() * p.ln() + (1.0 - y.as_f64()) * (1.0 - p).ln())
        };
        let mut learner = WeakLearner::from_parts(LearnerKind::Logistic { learning_rate: lr }, w.clone(), b)
            .expect("finite parameters");
        let fv = FeatureVector::dense(x.clone()).expect("finite features");
        learner.update(&fv, y).expect("matching dimension");
        for i in 0..d {
            let mut up = w.clone();
            let mut down = w.clone();
            up[i] += h;
            down[i] -= h;
            let fd = (loss(&up, b) - loss(&down, b)) / (2.0 * h);
            let step = -(learner.weights()[i] - w[i]) / lr;
            if fd.abs() > 1e-8 {
                worst = worst.max(((step - fd) / fd).abs());
            }
        }
    }
    check("logistic_gradient", worst < 1e-5, format!("worst relative error {worst:.2e}"))
}

fn toy_stream(n: usize, seed: u64) -> Vec<TaggedInstance> {
    let mut rng = SeededRng::new(seed);
    (0..n)
        .map(|i| {
            let x: Vec<f64> = (0..3).map(|_| rng.uniform() * 2.0 - 1.0).collect();
            let y = Label::from_bool(x[0] + 0.5 * x[1] > 0.1);
            let domain = if i % 3 == 0 { DomainTag::Target } else { DomainTag::Source };
            TaggedInstance::new(FeatureVector::dense(x).expect("finite"), y, domain)
        })
        .collect()
}

fn degenerate_ensemble() -> CheckOutcome {
    let stream = toy_stream(200, 1);
    let config = EnsembleConfig::new(1, LearnerKind::Perceptron);
    let model = match train_otbag(&stream, &config, &mut ConstantDraws(1)) {
        Ok(m) => m,
        Err(e) => return check("degenerate_ensemble", false, e.to_string()),
    };
    let mut single = WeakLearner::new(LearnerKind::Perceptron, 3).expect("dimension 3");
    for i in &stream {
        single.update(&i.x, i.y).expect("matching dimension");
    }
    let probes = toy_stream(100, 2);
    let agree = probes
        .iter()
        .filter(|p| model.predict(&p.x).ok() == single.predict(&p.x).ok())
        .count();
    check("degenerate_ensemble", agree == probes.len(), format!("{agree}/100 agree"))
}

fn serialization() -> CheckOutcome {
    let stream = toy_stream(90, 4);
    let config = EnsembleConfig::new(5, LearnerKind::logistic());
    let models: Vec<Model> = match (
        train_otbag(&stream, &config, &mut SeededRng::new(1)),
        train_sdmv(&stream, &config, &mut SeededRng::new(1)),
        train_jdsmv(&stream, &config, Segmentation::Count(3), &mut SeededRng::new(1)),
    ) {
        (Ok(a), Ok(b), Ok(c)) => vec![a.into(), b.into(), c.into()],
        _ => return check("serialization", false, "training failed".into()),
    };
    let probes = toy_stream(200, 9);
    let mut ok = true;
    for model in &models {
        match read_model(write_model(model).as_bytes()) {
            Ok(back) => {
                ok &= probes
                    .iter()
                    .all(|p| back.predict(&p.x).ok() == model.predict(&p.x).ok());
            }
            Err(_) => ok = false,
        }
    }
    check("serialization", ok, "otbag, sdmv, jdsmv".into())
}

fn determinism() -> CheckOutcome {
    let config = ExperimentConfig {
        task: TaskSpec::Synthetic(SyntheticSpec {
            n_source: 200,
            n_test: 200,
            ..Default::default()
        }),
        repetitions: 3,
        base_seed: 5,
        ..Default::default()
    };
    let render = || {
        run_experiment(&config).and_then(|t| render_report(&t, ReportFormat::Json, false))
    };
    match (render(), render()) {
        (Ok(a), Ok(b)) => check("determinism", a == b, format!("{} byte reports", a.len())),
        (Err(e), _) | (_, Err(e)) => check("determinism", false, e.to_string()),
    }
}

/// Runs every check in a fixed order.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        poisson_limit(),
        sampler_statistics(),
        vote_exhaustive(),
        logistic_gradient(),
        degenerate_ensemble(),
        serialization(),
        determinism(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for outcome in run_all() {
            assert!(outcome.passed, "{outcome:?}");
        }
    }

    #[test]
    fn chi2_survival_matches_known_quantiles() {
        // 4 dof: the 0.95 quantile is 9.4877 and the 0.999 quantile 18.4668.
        assert!((chi2_sf_4(9.4877) - 0.05).abs() < 1e-4);
        assert!((chi2_sf_4(18.4668) - 0.001).abs() < 1e-5);
    }
}
