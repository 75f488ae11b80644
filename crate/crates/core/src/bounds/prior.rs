use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classes::FunctionClass;
use crate::complexity::{fill_signs, rademacher, trc, Gathered};
use crate::config::{monte_carlo, EstimationConfig, Mode};
use crate::error::{Error, Result};
use crate::numeric::{binomial, saturating_pow, PairwiseSum};

/// Constant of the transductive-Rademacher symmetrization bound.
pub const C0: f64 = 5.05;

/// Right-hand sides of the two earlier upper bounds on the expected
/// empirical-process supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorBounds {
    /// `(N/u) E_{X_m}[R_m(F, X_m)]` with `X_m` drawn with replacement.
    pub rhs_eq3: f64,
    pub rhs_eq3_std_error: f64,
    /// `TRC(F, Z_N, p0) + c0 B N sqrt(min(m,u)) / (m u)`.
    pub rhs_eq4: f64,
    pub rhs_eq4_std_error: f64,
    pub p0: f64,
    pub c0: f64,
    pub method: Mode,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

/// Evaluates both prior bounds for train size `m` drawn from `points`.
///
/// In exact mode the with-replacement expectation runs over all multisets of
/// size `m` with multinomial weights, and the TRC is enumerated. In Monte
/// Carlo mode each draw samples `X_m` and one sign vector jointly.
pub fn prior_bounds(
    class: &FunctionClass,
    points: &[usize],
    m: usize,
    config: &EstimationConfig,
) -> Result<PriorBounds> {
    config.validate()?;
    let big_n = points.len();
    if m == 0 || m >= big_n {
        return Err(Error::InvalidSize(format!(
            "train size must satisfy 1 <= m < N, got m = {m}, N = {big_n}"
        )));
    }
    let u = big_n - m;
    let ratio = big_n as f64 / u as f64;
    let (eq3_mean, eq3_se, samples) = match config.mode {
        Mode::Exact => {
            let (mean, count) = with_replacement_rademacher_exact(class, points, m, config)?;
            (mean, 0.0, count)
        }
        Mode::MonteCarlo => {
            let local = Gathered::new(class, points)?;
            let scale = 2.0 / m as f64;
            let mc = monte_carlo(
                config,
                || (vec![0.0; m], vec![0.0; big_n]),
                |(signs, coef), rng| {
                    fill_signs(rng, signs);
                    coef.fill(0.0);
                    for &s in signs.iter() {
                        coef[rng.gen_range(0..big_n)] += s;
                    }
                    local.sup(coef, false)
                },
            );
            (scale * mc.mean, scale * mc.std_error, mc.samples)
        }
    };
    let p0 = (m * u) as f64 / (big_n * big_n) as f64;
    let t = trc(class, points, m, u, p0, config)?;
    let additive = C0 * class.bound() * big_n as f64 * (m.min(u) as f64).sqrt() / (m * u) as f64;
    Ok(PriorBounds {
        rhs_eq3: ratio * eq3_mean,
        rhs_eq3_std_error: ratio * eq3_se,
        rhs_eq4: t.value + additive,
        rhs_eq4_std_error: t.std_error,
        p0,
        c0: C0,
        method: config.mode,
        samples,
        seed: config.seed,
        workers: config.workers,
    })
}

/// Calls `visit(multiset, weight)` for every nondecreasing index sequence of
/// length `m` over `0..n`; `weight` is its probability under `m` uniform
/// draws with replacement.
fn for_each_multiset(n: usize, m: usize, mut visit: impl FnMut(&[usize], f64)) {
    let mut seq = vec![0usize; m];
    let log_fact: Vec<f64> = (0..=m).scan(0.0, |acc, k| {
        if k > 0 {
            *acc += (k as f64).ln();
        }
        Some(*acc)
    }).collect();
    let log_total = m as f64 * (n as f64).ln();
    loop {
        let mut log_w = log_fact[m] - log_total;
        let mut run = 1;
        for i in 1..=m {
            if i < m && seq[i] == seq[i - 1] {
                run += 1;
            } else {
                log_w -= log_fact[run];
                run = 1;
            }
        }
        visit(&seq, log_w.exp());
        // next nondecreasing sequence
        let mut i = m;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if seq[i] + 1 < n {
                let v = seq[i] + 1;
                for s in &mut seq[i..] {
                    *s = v;
                }
                break;
            }
        }
    }
}

fn with_replacement_rademacher_exact(
    class: &FunctionClass,
    points: &[usize],
    m: usize,
    config: &EstimationConfig,
) -> Result<(f64, u64)> {
    let big_n = points.len();
    let multisets = binomial((big_n + m - 1) as u64, m as u64);
    let count = multisets.saturating_mul(saturating_pow(2, m as u64));
    config.check_cap(count)?;
    let mut acc = PairwiseSum::new();
    let mut err = None;
    let mut sample = vec![0usize; m];
    for_each_multiset(big_n, m, |seq, w| {
        if err.is_some() {
            return;
        }
        for (s, &i) in sample.iter_mut().zip(seq) {
            *s = points[i];
        }
        match rademacher(class, &sample, config, false) {
            Ok(r) => acc.add(w * r.value),
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok((acc.total(), count as u64)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::random_class;
    use crate::complexity::empirical_process_sup;
    use crate::config::rng_from_seed;

    #[test]
    fn multiset_weights_sum_to_one() {
        for (n, m) in [(3, 2), (4, 3), (5, 5)] {
            let mut total = 0.0;
            let mut count = 0u128;
            for_each_multiset(n, m, |_, w| {
                total += w;
                count += 1;
            });
            assert!((total - 1.0).abs() < 1e-12);
            assert_eq!(count, binomial((n + m - 1) as u64, m as u64));
        }
    }

    #[test]
    fn exact_eq3_matches_ordered_tuple_oracle() {
        // Oracle: average over all N^m ordered tuples.
        let c = random_class(3, 4, 1.0, &mut rng_from_seed(5)).unwrap();
        let pts: Vec<usize> = (0..4).collect();
        let cfg = EstimationConfig::exact();
        let mut total = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                total += rademacher(&c, &[a, b], &cfg, false).unwrap().value;
            }
        }
        let pb = prior_bounds(&c, &pts, 2, &cfg).unwrap();
        assert!((pb.rhs_eq3 - 2.0 * total / 16.0).abs() < 1e-12);
    }

    #[test]
    fn zero_class_reduces_to_constants() {
        let c = FunctionClass::new(vec![vec![0.0; 6]], None, "zero").unwrap();
        let pb = prior_bounds(&c, &(0..6).collect::<Vec<_>>(), 3, &EstimationConfig::exact()).unwrap();
        assert_eq!(pb.rhs_eq3, 0.0);
        assert_eq!(pb.rhs_eq4, 0.0);
        assert_eq!(pb.p0, 0.25);
    }

    #[test]
    fn both_dominate_the_supremum() {
        for seed in 0..10 {
            let c = random_class(4, 6, 1.0, &mut rng_from_seed(seed)).unwrap();
            let pts: Vec<usize> = (0..6).collect();
            let cfg = EstimationConfig::exact();
            let e = empirical_process_sup(&c, &pts, 3, &cfg, false).unwrap().value;
            let pb = prior_bounds(&c, &pts, 3, &cfg).unwrap();
            assert!(pb.rhs_eq3 >= e - 1e-9 && pb.rhs_eq4 >= e - 1e-9);
        }
    }

    #[test]
    fn monte_carlo_eq3_agrees_with_exact() {
        let c = random_class(3, 6, 1.0, &mut rng_from_seed(2)).unwrap();
        let pts: Vec<usize> = (0..6).collect();
        let exact = prior_bounds(&c, &pts, 3, &EstimationConfig::exact()).unwrap();
        let mc = prior_bounds(&c, &pts, 3, &EstimationConfig::monte_carlo(50_000, 1)).unwrap();
        assert!((mc.rhs_eq3 - exact.rhs_eq3).abs() < 5.0 * mc.rhs_eq3_std_error);
        assert!((mc.rhs_eq4 - exact.rhs_eq4).abs() < 5.0 * mc.rhs_eq4_std_error);
    }
}
