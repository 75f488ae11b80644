use crate::classes::FunctionClass;
use crate::config::{monte_carlo, EstimationConfig, Mode};
use crate::enumerate::{for_each_subset, Space};
use crate::error::{Error, Result};
use crate::numeric::PairwiseSum;
use crate::sampling::shuffle_prefix;

use super::{ComplexityEstimate, Quantity};

/// Maximal discrepancy of the class for one ordering of an even-sized sample:
/// `max_f (2/m) (sum of the first half - sum of the second half)`.
pub fn max_discrepancy(class: &FunctionClass, ordering: &[usize]) -> Result<f64> {
    let m = ordering.len();
    if m == 0 || m % 2 != 0 {
        return Err(Error::Parity(format!("maximal discrepancy needs a positive even sample size, got {m}")));
    }
    if let Some(&bad) = ordering.iter().find(|&&p| p >= class.num_points()) {
        return Err(Error::InvalidArgument(format!(
            "point {bad} out of range for a class over {} points",
            class.num_points()
        )));
    }
    let (first, second) = ordering.split_at(m / 2);
    let scale = 2.0 / m as f64;
    Ok(class
        .rows()
        .map(|r| {
            let a: f64 = first.iter().map(|&i| r[i]).sum();
            let b: f64 = second.iter().map(|&i| r[i]).sum();
            scale * (a - b)
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Maximal discrepancy averaged over uniformly random orderings of `points`.
///
/// The discrepancy depends on an ordering only through which points fill the
/// first half, so exact mode averages over all `C(m, m/2)` first halves.
pub fn expected_discrepancy(
    class: &FunctionClass,
    points: &[usize],
    config: &EstimationConfig,
) -> Result<ComplexityEstimate> {
    config.validate()?;
    let m = points.len();
    if m == 0 || m % 2 != 0 {
        return Err(Error::Parity(format!("maximal discrepancy needs a positive even sample size, got {m}")));
    }
    let half = m / 2;
    let est = match config.mode {
        Mode::Exact => {
            let count = Space::BalancedVectors { m }.checked_count(config.enumeration_cap)?;
            let mut ordering = Vec::with_capacity(m);
            let mut in_first = vec![false; m];
            let mut acc = PairwiseSum::new();
            let mut err = None;
            for_each_subset(m, half, |first| {
                if err.is_some() {
                    return;
                }
                in_first.fill(false);
                for &i in first {
                    in_first[i] = true;
                }
                ordering.clear();
                ordering.extend(first.iter().map(|&i| points[i]));
                ordering.extend((0..m).filter(|&i| !in_first[i]).map(|i| points[i]));
                match max_discrepancy(class, &ordering) {
                    Ok(d) => acc.add(d),
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            ComplexityEstimate::exact(Quantity::MaxDiscrepancy, acc.total() / count as f64, count, config, false)
        }
        Mode::MonteCarlo => {
            // Validate once so the sampler cannot fail.
            max_discrepancy(class, points)?;
            let mc = monte_carlo(
                config,
                || points.to_vec(),
                |ordering, rng| {
                    shuffle_prefix(ordering, half, rng);
                    max_discrepancy(class, ordering).expect("validated ordering")
                },
            );
            ComplexityEstimate::monte_carlo(Quantity::MaxDiscrepancy, mc, 1.0, config, false)
        }
    };
    Ok(est.with_param("m", m as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::random_class;
    use crate::complexity::prc;
    use crate::complexity::test_support::{all, class};
    use crate::config::rng_from_seed;

    #[test]
    fn singleton_is_half_mean_difference() {
        let c = class(&[&[1.0, 3.0, -2.0, 0.0]]);
        // first half {1, 3}: mean 2; second half {-2, 0}: mean -1
        assert_eq!(max_discrepancy(&c, &[0, 1, 2, 3]).unwrap(), 3.0);
        assert_eq!(max_discrepancy(&c, &[2, 3, 0, 1]).unwrap(), -3.0);
    }

    #[test]
    fn constant_class_is_zero() {
        let c = class(&[&[0.4; 6]]);
        for ord in [[0, 1, 2, 3, 4, 5], [5, 3, 1, 0, 2, 4]] {
            assert_eq!(max_discrepancy(&c, &ord).unwrap(), 0.0);
        }
    }

    #[test]
    fn odd_size_is_a_parity_error() {
        let c = class(&[&[1.0, 2.0, 3.0]]);
        assert!(matches!(max_discrepancy(&c, &[0, 1, 2]), Err(Error::Parity(_))));
        assert!(matches!(
            expected_discrepancy(&c, &[0, 1, 2], &EstimationConfig::exact()),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn average_over_orderings_matches_prc() {
        for seed in 0..10 {
            let c = random_class(5, 8, 1.0, &mut rng_from_seed(seed)).unwrap();
            let cfg = EstimationConfig::exact();
            let d = expected_discrepancy(&c, &all(8), &cfg).unwrap().value;
            let q = prc(&c, &all(8), 4, &cfg, false).unwrap().value;
            assert!((d - q).abs() < 1e-12);
        }
    }

    #[test]
    fn monte_carlo_agrees() {
        let c = random_class(5, 8, 1.0, &mut rng_from_seed(1)).unwrap();
        let exact = expected_discrepancy(&c, &all(8), &EstimationConfig::exact()).unwrap().value;
        let mc = expected_discrepancy(&c, &all(8), &EstimationConfig::monte_carlo(40_000, 2)).unwrap();
        assert!((mc.value - exact).abs() < 5.0 * mc.std_error);
    }
}
