use crate::classes::FunctionClass;
use crate::config::{monte_carlo, EstimationConfig, Mode};
use crate::enumerate::{for_each_subset, Space};
use crate::error::{Error, Result};
use crate::numeric::PairwiseSum;
use crate::sampling::shuffle_prefix;

use super::{ComplexityEstimate, Gathered, Quantity};

/// `max_f (mean over test - mean over train)` for one split of the gathered
/// points, given a membership mask for the train side.
fn sup_deviation(local: &Gathered, in_train: &[bool], m: usize, abs: bool) -> f64 {
    let u = local.width() - m;
    let mut best = f64::NEG_INFINITY;
    for row in local.rows() {
        let (mut train, mut test) = (0.0, 0.0);
        for (v, &t) in row.iter().zip(in_train) {
            if t {
                train += v;
            } else {
                test += v;
            }
        }
        let d = test / u as f64 - train / m as f64;
        best = best.max(if abs { d.abs() } else { d });
    }
    best
}

/// Expected supremum of the empirical process under sampling without
/// replacement: `E_{Z_m} max_f (mean_f(Z_u) - mean_f(Z_m))`, where `Z_m` is a
/// uniform `m`-subset of `points` and `Z_u` its complement.
///
/// Exact mode enumerates all `C(N, m)` partitions.
pub fn empirical_process_sup(
    class: &FunctionClass,
    points: &[usize],
    m: usize,
    config: &EstimationConfig,
    abs_variant: bool,
) -> Result<ComplexityEstimate> {
    config.validate()?;
    let local = Gathered::new(class, points)?;
    let big_n = local.width();
    if m == 0 || m >= big_n {
        return Err(Error::InvalidSize(format!(
            "train size must satisfy 1 <= m < N, got m = {m}, N = {big_n}"
        )));
    }
    let est = match config.mode {
        Mode::Exact => {
            let count = Space::Subsets { n: big_n, k: m }.checked_count(config.enumeration_cap)?;
            let mut mask = vec![false; big_n];
            let mut acc = PairwiseSum::new();
            for_each_subset(big_n, m, |train| {
                mask.fill(false);
                for &i in train {
                    mask[i] = true;
                }
                acc.add(sup_deviation(&local, &mask, m, abs_variant));
            });
            ComplexityEstimate::exact(
                Quantity::EmpiricalProcessSup,
                acc.total() / count as f64,
                count,
                config,
                abs_variant,
            )
        }
        Mode::MonteCarlo => {
            let mc = monte_carlo(
                config,
                || ((0..big_n).collect::<Vec<usize>>(), vec![false; big_n]),
                |(perm, mask), rng| {
                    shuffle_prefix(perm, m, rng);
                    mask.fill(false);
                    for &i in &perm[..m] {
                        mask[i] = true;
                    }
                    sup_deviation(&local, mask, m, abs_variant)
                },
            );
            ComplexityEstimate::monte_carlo(Quantity::EmpiricalProcessSup, mc, 1.0, config, abs_variant)
        }
    };
    Ok(est
        .with_param("N", big_n as f64)
        .with_param("m", m as f64)
        .with_param("u", (big_n - m) as f64))
}
