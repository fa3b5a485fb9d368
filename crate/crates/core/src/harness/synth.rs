use rand_distr::{Distribution, StandardNormal};

use super::config::{SynthKind, SyntheticSpec};
use crate::data::{Dataset, TransferTask};
use crate::domain::{Example, FeatureVector, Label};
use crate::error::{Error, Result};
use crate::sampling::{streams, SeededRng};

fn gaussian_set(
    name: &str,
    n: usize,
    spec: &SyntheticSpec,
    flip_labels: bool,
    rng: &mut SeededRng,
) -> Result<Dataset> {
    let half = spec.separation / 2.0;
    let examples = (0..n)
        .map(|i| {
            let y = Label::from_bool(i % 2 == 1);
            let mut x: Vec<f64> = (0..spec.dimension)
                .map(|_| StandardNormal.sample(rng.rng()))
                .collect();
            x[0] += y.sign() * half;
            let y = if flip_labels { y.flipped() } else { y };
            Ok(Example::new(FeatureVector::dense(x)?, y))
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(name, spec.dimension, examples)
}

/// Two unit-variance Gaussian classes centred at `±(separation/2)·e_1`, with
/// alternating labels in each set.
///
/// The source follows the target distribution; for [`SynthKind::Flipped`] its
/// labels are inverted, so its concept contradicts the target's.
pub fn make_synthetic_task(spec: &SyntheticSpec, seed: u64) -> Result<TransferTask> {
    if spec.dimension == 0 || spec.n_source == 0 || spec.n_target == 0 || spec.n_test == 0 {
        return Err(Error::BadConfig("synthetic dimension and counts must be positive".into()));
    }
    let mut rng = SeededRng::with_stream(seed, streams::SYNTH);
    let flipped = spec.kind == SynthKind::Flipped;
    let prefix = match spec.kind {
        SynthKind::Aligned => "aligned",
        SynthKind::Flipped => "flipped",
    };
    let source = gaussian_set(&format!("{prefix}_source"), spec.n_source, spec, flipped, &mut rng)?;
    let target_train = gaussian_set("target_train", spec.n_target, spec, false, &mut rng)?;
    let target_test = gaussian_set("target_test", spec.n_test, spec, false, &mut rng)?;
    Ok(TransferTask {
        source,
        target_train,
        target_test,
        seed,
    })
}
