//! Poisson(1) resampling counts and the binomial law they approximate.
//!
//! Offline bagging includes each of `N` training instances `k` times with
//! probability `C(N,k) (1/N)^k (1-1/N)^(N-k)`. As `N` grows this tends to
//! `e^-1 / k!`, which no longer depends on `N` and can be drawn per arriving
//! instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Sub-stream ids used with [`SeededRng::with_stream`] so that one seed drives
/// independent random decisions within a repetition.
pub mod streams {
    pub const SPLIT: u64 = 1;
    pub const INTERLEAVE: u64 = 2;
    pub const RESAMPLE: u64 = 3;
    pub const SYNTH: u64 = 4;
    pub const SUBSAMPLE: u64 = 5;
}

/// Source of per-(instance, member) resampling counts.
///
/// Training consumes one count per member per instance, members in order.
/// Tests substitute [`ConstantDraws`] or [`ScriptedDraws`] to pin the counts.
pub trait PoissonSource {
    fn draw(&mut self) -> u32;
}

impl<P: PoissonSource + ?Sized> PoissonSource for &mut P {
    fn draw(&mut self) -> u32 {
        (**self).draw()
    }
}

/// Seeded ChaCha8 generator; identical seeds give identical sequences on every
/// platform.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent sub-sequence `stream` of the generator seeded by `seed`.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.inner
    }

    /// Knuth's product method: multiply uniforms until the product drops
    /// below `e^-1`; the number of factors minus one is Poisson(1).
    pub fn poisson1(&mut self) -> u32 {
        let threshold = (-1.0f64).exp();
        let mut k = 0;
        let mut product = self.uniform();
        while product >= threshold {
            k += 1;
            product *= self.uniform();
        }
        k
    }
}

impl PoissonSource for SeededRng {
    fn draw(&mut self) -> u32 {
        self.poisson1()
    }
}

/// Always returns the same count.
#[derive(Debug, Clone, Copy)]
pub struct ConstantDraws(pub u32);

impl PoissonSource for ConstantDraws {
    fn draw(&mut self) -> u32 {
        self.0
    }
}

/// Replays a fixed list of counts, cycling when exhausted.
#[derive(Debug, Clone)]
pub struct ScriptedDraws {
    counts: Vec<u32>,
    next: usize,
}

impl ScriptedDraws {
    pub fn new(counts: Vec<u32>) -> Self {
        assert!(!counts.is_empty(), "scripted draws need at least one count");
        Self { counts, next: 0 }
    }

    pub fn consumed(&self) -> usize {
        self.next
    }
}

impl PoissonSource for ScriptedDraws {
    fn draw(&mut self) -> u32 {
        let k = self.counts[self.next % self.counts.len()];
        self.next += 1;
        k
    }
}

fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// `P(K = k)` for `K ~ Poisson(1)`.
pub fn poisson1_pmf(k: u64) -> f64 {
    (-1.0 - ln_factorial(k)).exp()
}

/// `P(K = k)` for `K ~ Binomial(n, 1/n)`, evaluated in log space.
pub fn binomial_pmf(n: u64, k: u64) -> Result<f64> {
    if n == 0 || k > n {
        return Err(Error::BadSupport { n, k });
    }
    let small = k.min(n - k);
    let ln_choose: f64 = (0..small)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum();
    let p = 1.0 / n as f64;
    let ln_hits = k as f64 * p.ln();
    let ln_misses = if n == k {
        0.0
    } else {
        (n - k) as f64 * (-p).ln_1p()
    };
    Ok((ln_choose + ln_hits + ln_misses).exp())
}
