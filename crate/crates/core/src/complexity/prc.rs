use crate::classes::FunctionClass;
use crate::config::{monte_carlo, EstimationConfig, Mode};
use crate::enumerate::{for_each_subset, Space};
use crate::error::{Error, Result};
use crate::numeric::PairwiseSum;
use crate::sampling::shuffle_prefix;

use super::{check_subset_split, ComplexityEstimate, Gathered, Quantity};

/// Writes `+1/k` on the complement and `-1/n` on the chosen positions.
fn split_coefficients(coef: &mut [f64], chosen: &[usize]) {
    let m = coef.len();
    let n = chosen.len();
    coef.fill(1.0 / (m - n) as f64);
    for &i in chosen {
        coef[i] = -1.0 / n as f64;
    }
}

/// Permutational Rademacher complexity
/// `E_{Z_n} max_f (mean_f(Z_k) - mean_f(Z_n))`, where `Z_n` is a uniform
/// `n`-subset of `points` and `Z_k` its complement.
///
/// Exact mode enumerates all `C(m, n)` splits.
pub fn prc(
    class: &FunctionClass,
    points: &[usize],
    n: usize,
    config: &EstimationConfig,
    abs_variant: bool,
) -> Result<ComplexityEstimate> {
    config.validate()?;
    let local = Gathered::new(class, points)?;
    let m = local.width();
    check_subset_split(m, n)?;
    let est = match config.mode {
        Mode::Exact => {
            let count = Space::Subsets { n: m, k: n }.checked_count(config.enumeration_cap)?;
            let mut coef = vec![0.0; m];
            let mut acc = PairwiseSum::new();
            for_each_subset(m, n, |chosen| {
                split_coefficients(&mut coef, chosen);
                acc.add(local.sup(&coef, abs_variant));
            });
            ComplexityEstimate::exact(Quantity::Prc, acc.total() / count as f64, count, config, abs_variant)
        }
        Mode::MonteCarlo => {
            let mc = monte_carlo(
                config,
                || ((0..m).collect::<Vec<usize>>(), vec![0.0; m]),
                |(perm, coef), rng| {
                    shuffle_prefix(perm, n, rng);
                    split_coefficients(coef, &perm[..n]);
                    local.sup(coef, abs_variant)
                },
            );
            ComplexityEstimate::monte_carlo(Quantity::Prc, mc, 1.0, config, abs_variant)
        }
    };
    Ok(est.with_param("m", m as f64).with_param("n", n as f64))
}

/// `E_{Z_m}[Q_{m,n}(F, Z_m)]`: the permutational complexity averaged over
/// uniform train sets `Z_m` drawn from `points`.
///
/// Exact mode enumerates `C(N, m) * C(m, n)` nested splits. Monte Carlo draws
/// the pair `(Z_n, Z_k)` jointly as disjoint uniform subsets of sizes `n` and
/// `m - n`, which has the same law.
pub fn expected_prc(
    class: &FunctionClass,
    points: &[usize],
    m: usize,
    n: usize,
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
    check_subset_split(m, n)?;
    let est = match config.mode {
        Mode::Exact => {
            let outer = Space::Subsets { n: big_n, k: m }.count();
            let inner = Space::Subsets { n: m, k: n }.count();
            let count = outer.saturating_mul(inner);
            config.check_cap(count)?;
            let mut coef = vec![0.0; big_n];
            let mut local_coef = vec![0.0; m];
            let mut acc = PairwiseSum::new();
            for_each_subset(big_n, m, |train| {
                for_each_subset(m, n, |chosen| {
                    split_coefficients(&mut local_coef, chosen);
                    coef.fill(0.0);
                    for (&p, &c) in train.iter().zip(&local_coef) {
                        coef[p] = c;
                    }
                    acc.add(local.sup(&coef, abs_variant));
                });
            });
            ComplexityEstimate::exact(Quantity::ExpectedPrc, acc.total() / count as f64, count, config, abs_variant)
        }
        Mode::MonteCarlo => {
            let mc = monte_carlo(
                config,
                || ((0..big_n).collect::<Vec<usize>>(), vec![0.0; big_n]),
                |(perm, coef), rng| {
                    shuffle_prefix(perm, m, rng);
                    coef.fill(0.0);
                    for &p in &perm[..n] {
                        coef[p] = -1.0 / n as f64;
                    }
                    for &p in &perm[n..m] {
                        coef[p] = 1.0 / (m - n) as f64;
                    }
                    local.sup(coef, abs_variant)
                },
            );
            ComplexityEstimate::monte_carlo(Quantity::ExpectedPrc, mc, 1.0, config, abs_variant)
        }
    };
    Ok(est
        .with_param("N", big_n as f64)
        .with_param("m", m as f64)
        .with_param("n", n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{lemma3_classes, random_class};
    use crate::complexity::test_support::{all, class};
    use crate::config::{rng_from_seed, DEFAULT_ENUMERATION_CAP as CAP};
    use crate::sampling::average_on_subset;

    #[test]
    fn lemma3_values() {
        for m in [2usize, 4, 6, 8] {
            let (fp, fpp) = lemma3_classes(m, CAP).unwrap();
            let cfg = EstimationConfig::exact();
            assert!(prc(&fp, &all(m), m / 2, &cfg, false).unwrap().value.abs() < 1e-12);
            assert!((prc(&fpp, &all(m), m / 2, &cfg, false).unwrap().value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singleton_class_is_zero_for_every_n() {
        let c = class(&[&[0.3, -1.2, 2.0, 0.5, 0.1]]);
        for n in 1..5 {
            let v = prc(&c, &all(5), n, &EstimationConfig::exact(), false).unwrap().value;
            assert!(v.abs() < 1e-12, "n={n}: {v}");
        }
    }

    #[test]
    fn matches_direct_enumeration_oracle() {
        // Oracle uses explicit subset means rather than coefficient vectors.
        let c = random_class(4, 6, 1.0, &mut rng_from_seed(17)).unwrap();
        let pts = all(6);
        for n in 1..6 {
            let mut total = 0.0;
            let mut count = 0.0;
            crate::enumerate::for_each_subset(6, n, |zn| {
                let zk: Vec<usize> = pts.iter().copied().filter(|p| !zn.contains(p)).collect();
                let best = c
                    .rows()
                    .map(|r| average_on_subset(r, &zk).unwrap() - average_on_subset(r, zn).unwrap())
                    .fold(f64::NEG_INFINITY, f64::max);
                total += best;
                count += 1.0;
            });
            let v = prc(&c, &pts, n, &EstimationConfig::exact(), false).unwrap().value;
            assert!((v - total / count).abs() < 1e-12);
        }
    }

    #[test]
    fn split_size_errors() {
        let c = class(&[&[1.0, 2.0, 3.0]]);
        let cfg = EstimationConfig::exact();
        assert!(matches!(prc(&c, &all(3), 0, &cfg, false), Err(Error::InvalidSize(_))));
        assert!(matches!(prc(&c, &all(3), 3, &cfg, false), Err(Error::InvalidSize(_))));
        assert!(expected_prc(&c, &all(3), 3, 1, &cfg, false).is_err());
    }

    #[test]
    fn odd_m_is_allowed() {
        let c = random_class(3, 5, 1.0, &mut rng_from_seed(2)).unwrap();
        for n in 1..5 {
            assert!(prc(&c, &all(5), n, &EstimationConfig::exact(), false).unwrap().value >= -1e-12);
        }
    }

    #[test]
    fn expected_prc_matches_average_of_prc() {
        let c = random_class(3, 6, 1.0, &mut rng_from_seed(8)).unwrap();
        let cfg = EstimationConfig::exact();
        let mut acc = 0.0;
        let mut count = 0.0;
        crate::enumerate::for_each_subset(6, 3, |train| {
            acc += prc(&c, train, 1, &cfg, false).unwrap().value;
            count += 1.0;
        });
        let e = expected_prc(&c, &all(6), 3, 1, &cfg, false).unwrap();
        assert!((e.value - acc / count).abs() < 1e-12);
        assert_eq!(e.samples, 20 * 3);
    }

    #[test]
    fn monte_carlo_agrees() {
        let c = random_class(3, 6, 1.0, &mut rng_from_seed(8)).unwrap();
        let exact = expected_prc(&c, &all(6), 3, 1, &EstimationConfig::exact(), false).unwrap().value;
        let mc = expected_prc(&c, &all(6), 3, 1, &EstimationConfig::monte_carlo(40_000, 3), false).unwrap();
        assert!((mc.value - exact).abs() < 5.0 * mc.std_error);
        let exact = prc(&c, &all(6), 2, &EstimationConfig::exact(), true).unwrap().value;
        let mc = prc(&c, &all(6), 2, &EstimationConfig::monte_carlo(40_000, 4), true).unwrap();
        assert!((mc.value - exact).abs() < 5.0 * mc.std_error);
    }
}
