//! Estimation configuration and the reproducible-randomness contract.
//!
//! Monte Carlo work is split over `workers` independent substreams. Worker
//! `w` owns a ChaCha8 generator seeded with [`substream_seed`]`(seed, w)` and
//! draws a contiguous share of the samples (the first `samples % workers`
//! workers take one extra). Draws are concatenated in worker order before
//! summation, so a fixed `(seed, workers)` pair always reproduces the same
//! bits regardless of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// Largest number of outcomes exact mode will enumerate unless overridden.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 22;

/// Generator type behind every seeded stream in the crate.
pub type SeedRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeedRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of worker `worker`'s substream: `splitmix64(master ^ splitmix64(worker))`.
pub fn substream_seed(master: u64, worker: u64) -> u64 {
    splitmix64(master ^ splitmix64(worker))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimationConfig {
    pub mode: Mode,
    /// Number of Monte Carlo draws; ignored in exact mode.
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub enumeration_cap: u64,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self::exact()
    }
}

impl EstimationConfig {
    pub fn exact() -> Self {
        Self {
            mode: Mode::Exact,
            samples: 0,
            seed: 0,
            workers: 1,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        Self {
            mode: Mode::MonteCarlo,
            samples,
            seed,
            ..Self::exact()
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.enumeration_cap = cap;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.mode == Mode::Exact
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidArgument("workers must be positive".into()));
        }
        if self.enumeration_cap == 0 {
            return Err(Error::InvalidArgument("enumeration cap must be positive".into()));
        }
        if self.mode == Mode::MonteCarlo && self.samples == 0 {
            return Err(Error::InvalidArgument(
                "monte carlo mode needs at least one sample".into(),
            ));
        }
        Ok(())
    }

    /// Refuses enumerations larger than the cap.
    pub fn check_cap(&self, count: u128) -> Result<()> {
        if count > u128::from(self.enumeration_cap) {
            Err(Error::CapExceeded {
                count,
                cap: self.enumeration_cap,
            })
        } else {
            Ok(())
        }
    }
}

/// Mean and standard error of a batch of Monte Carlo draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSummary {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`; 0 with a single draw.
    pub std_error: f64,
    pub samples: u64,
}

impl McSummary {
    pub fn from_draws(draws: &[f64]) -> Self {
        let n = draws.len();
        if n == 0 {
            return Self {
                mean: 0.0,
                std_error: 0.0,
                samples: 0,
            };
        }
        let mean = pairwise_sum(draws) / n as f64;
        let std_error = if n > 1 {
            let sq: Vec<f64> = draws.iter().map(|x| (x - mean) * (x - mean)).collect();
            let var = pairwise_sum(&sq) / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            samples: n as u64,
        }
    }
}

/// Runs `config.samples` independent draws across the configured substreams.
///
/// `init` builds per-worker scratch state; `draw` produces one sample.
pub fn monte_carlo<S, I, F>(config: &EstimationConfig, init: I, draw: F) -> McSummary
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut SeedRng) -> f64 + Sync,
{
    McSummary::from_draws(&monte_carlo_draws(config, init, draw))
}

/// Like [`monte_carlo`] but returns the raw draws in canonical order.
pub fn monte_carlo_draws<S, I, F>(config: &EstimationConfig, init: I, draw: F) -> Vec<f64>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut SeedRng) -> f64 + Sync,
{
    collect_draws(config, init, draw)
}

/// Runs `config.samples` draws of any type across the configured substreams
/// and returns them in canonical order (worker 0 first).
pub fn collect_draws<T, S, I, F>(config: &EstimationConfig, init: I, draw: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut SeedRng) -> T + Sync,
{
    let workers = config.workers.max(1) as u64;
    let total = config.samples;
    let share = |w: u64| total / workers + u64::from(w < total % workers);
    let run = |w: u64| -> Vec<T> {
        let mut rng = rng_from_seed(substream_seed(config.seed, w));
        let mut scratch = init();
        (0..share(w)).map(|_| draw(&mut scratch, &mut rng)).collect()
    };
    if workers == 1 {
        return run(0);
    }
    let parts: Vec<Vec<T>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let run = &run;
                scope.spawn(move || run(w))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("monte carlo worker panicked"))
            .collect()
    });
    parts.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn cap_is_enforced() {
        let cfg = EstimationConfig::exact().with_cap(10);
        assert!(cfg.check_cap(10).is_ok());
        assert!(matches!(cfg.check_cap(11), Err(Error::CapExceeded { count: 11, cap: 10 })));
    }

    #[test]
    fn substreams_differ_and_are_stable() {
        assert_ne!(substream_seed(7, 0), substream_seed(7, 1));
        assert_eq!(substream_seed(7, 3), substream_seed(7, 3));
    }

    #[test]
    fn draws_are_reproducible_for_fixed_workers() {
        for workers in [1, 3] {
            let cfg = EstimationConfig::monte_carlo(1001, 42).with_workers(workers);
            let a = monte_carlo_draws(&cfg, || (), |_, rng| rng.gen::<f64>());
            let b = monte_carlo_draws(&cfg, || (), |_, rng| rng.gen::<f64>());
            assert_eq!(a.len(), 1001);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn summary_of_constant_draws() {
        let s = McSummary::from_draws(&[2.0; 10]);
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std_error, 0.0);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(EstimationConfig::monte_carlo(0, 1).validate().is_err());
        assert!(EstimationConfig::exact().with_workers(0).validate().is_err());
    }
}
