use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::classes::{loss_class, loss_class_on, LabeledProblem};
use crate::complexity::prc;
use crate::config::{collect_draws, rng_from_seed, EstimationConfig, Mode};
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::sampling::shuffle_prefix;

use super::slack::{slack_term, SlackScale};

/// Smallest number of partitions a coverage run accepts.
pub const MIN_COVERAGE_TRIALS: u64 = 1000;

/// Empirical violation frequency of the train-set permutational bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub delta: f64,
    pub trials: u64,
    pub violations: u64,
    pub violation_rate: f64,
    /// Binomial standard error of the rate.
    pub rate_std_error: f64,
    #[serde(rename = "N")]
    pub population: usize,
    pub m: usize,
    pub n: usize,
    pub slack_term: f64,
    pub mean_complexity: f64,
    /// Largest `max_h err_u(h) - bound(h)` seen over the trials.
    pub worst_excess: f64,
    /// How the per-trial permutational complexity was computed.
    pub inner_method: Mode,
    pub inner_samples: u64,
    pub seed: u64,
    pub workers: usize,
}

/// Draws `trials` uniform half/half partitions and counts those where some
/// hypothesis has test risk above `err_m + Q_{m,n}(L_H, Z_m) + slack`.
///
/// `config.seed` and `config.workers` drive the partition streams.
/// `config.mode` selects how each trial's permutational complexity is
/// computed: exact enumeration, or `config.samples` Monte Carlo splits drawn
/// from the trial's own stream.
pub fn coverage_check(
    problem: &LabeledProblem,
    delta: f64,
    trials: u64,
    n: usize,
    config: &EstimationConfig,
) -> Result<CoverageReport> {
    config.validate()?;
    let big_n = problem.num_points();
    if big_n % 2 != 0 {
        return Err(Error::InvalidSize(format!("coverage needs an even population, got {big_n}")));
    }
    if trials < MIN_COVERAGE_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "coverage needs at least {MIN_COVERAGE_TRIALS} trials, got {trials}"
        )));
    }
    let m = big_n / 2;
    if n == 0 || n >= m {
        return Err(Error::InvalidSize(format!("split size must satisfy 1 <= n < m = {m}, got {n}")));
    }
    let slack = slack_term(big_n, delta, SlackScale::Two)?;
    let losses = loss_class(problem)?;
    let hyps = problem.num_hypotheses();
    let inner = match config.mode {
        Mode::Exact => EstimationConfig::exact().with_cap(config.enumeration_cap),
        Mode::MonteCarlo => EstimationConfig::monte_carlo(config.samples, 0),
    };
    let outer = EstimationConfig {
        mode: Mode::MonteCarlo,
        samples: trials,
        ..config.clone()
    };
    let local_points: Vec<usize> = (0..m).collect();
    let draws = collect_draws(
        &outer,
        || (0..big_n).collect::<Vec<usize>>(),
        |perm, rng| -> Result<(f64, f64)> {
            shuffle_prefix(perm, m, rng);
            let train = &perm[..m];
            let q_config = inner.clone().with_seed(rng.next_u64());
            let train_losses = loss_class_on(problem, train)?;
            let q = prc(&train_losses, &local_points, n, &q_config, false)?.value;
            let mut excess = f64::NEG_INFINITY;
            for h in 0..hyps {
                let row = losses.row(h);
                let err_m = train.iter().map(|&i| row[i]).sum::<f64>() / m as f64;
                let err_u = perm[m..].iter().map(|&i| row[i]).sum::<f64>() / (big_n - m) as f64;
                excess = excess.max(err_u - (err_m + q + slack));
            }
            Ok((excess, q))
        },
    );
    let mut excesses = Vec::with_capacity(draws.len());
    let mut qs = Vec::with_capacity(draws.len());
    for d in draws {
        let (e, q) = d?;
        excesses.push(e);
        qs.push(q);
    }
    let violations = excesses.iter().filter(|&&e| e > 0.0).count() as u64;
    let rate = violations as f64 / trials as f64;
    Ok(CoverageReport {
        delta,
        trials,
        violations,
        violation_rate: rate,
        rate_std_error: (rate * (1.0 - rate) / trials as f64).sqrt(),
        population: big_n,
        m,
        n,
        slack_term: slack,
        mean_complexity: pairwise_sum(&qs) / trials as f64,
        worst_excess: excesses.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        inner_method: inner.mode,
        inner_samples: if inner.is_exact() { 0 } else { inner.samples },
        seed: config.seed,
        workers: config.workers,
    })
}

/// Result of perturbing random train sets by single train/test swaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub swaps: u64,
    /// Largest observed change of `max_h (err_u(h) - err_m(h))`.
    pub max_change: f64,
    /// `1/m + 1/u`.
    pub limit: f64,
    /// Swaps whose change exceeded `limit + 1e-12`.
    pub violations: u64,
    pub seed: u64,
}

fn sup_deviation(rows: &[&[f64]], train: &[usize], test: &[usize]) -> f64 {
    let (m, u) = (train.len() as f64, test.len() as f64);
    rows.iter()
        .map(|r| test.iter().map(|&i| r[i]).sum::<f64>() / u - train.iter().map(|&i| r[i]).sum::<f64>() / m)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// For each swap: draws a uniform half/half partition, exchanges one random
/// train point with one random test point, and measures how much the
/// supremum deviation `max_h (err_u(h) - err_m(h))` moves.
pub fn bounded_difference_probe(problem: &LabeledProblem, swaps: u64, seed: u64) -> Result<ProbeReport> {
    let big_n = problem.num_points();
    if big_n % 2 != 0 {
        return Err(Error::InvalidSize(format!("the probe needs an even population, got {big_n}")));
    }
    let m = big_n / 2;
    let losses = loss_class(problem)?;
    let rows: Vec<&[f64]> = losses.rows().collect();
    let limit = 1.0 / m as f64 + 1.0 / (big_n - m) as f64;
    let mut rng = rng_from_seed(seed);
    let mut perm: Vec<usize> = (0..big_n).collect();
    let (mut max_change, mut violations) = (0.0f64, 0u64);
    for _ in 0..swaps {
        shuffle_prefix(&mut perm, m, &mut rng);
        let before = sup_deviation(&rows, &perm[..m], &perm[m..]);
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(m..big_n);
        perm.swap(i, j);
        let after = sup_deviation(&rows, &perm[..m], &perm[m..]);
        let change = (after - before).abs();
        max_change = max_change.max(change);
        if change > limit + 1e-12 {
            violations += 1;
        }
    }
    Ok(ProbeReport { swaps, max_change, limit, violations, seed })
}
