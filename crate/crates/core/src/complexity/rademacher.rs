use crate::classes::FunctionClass;
use crate::config::{monte_carlo, EstimationConfig, Mode};
use crate::enumerate::{for_each_sign_vector, Space};
use crate::error::Result;
use crate::numeric::PairwiseSum;

use super::{fill_signs, ComplexityEstimate, Gathered, Quantity};

/// Conditional Rademacher complexity `E_eps[(2/m) max_f sum_i eps_i f(x_i)]`
/// on the points `points` (repeats allowed).
///
/// Exact mode averages over all `2^m` sign vectors. `abs_variant` takes the
/// absolute value of the inner sum before the maximum.
pub fn rademacher(
    class: &FunctionClass,
    points: &[usize],
    config: &EstimationConfig,
    abs_variant: bool,
) -> Result<ComplexityEstimate> {
    config.validate()?;
    let local = Gathered::new(class, points)?;
    let m = local.width();
    let scale = 2.0 / m as f64;
    let est = match config.mode {
        Mode::Exact => {
            let count = Space::SignVectors { m }.checked_count(config.enumeration_cap)?;
            let mut coef = vec![0.0; m];
            let mut acc = PairwiseSum::new();
            for_each_sign_vector(m, |eps| {
                for (c, &e) in coef.iter_mut().zip(eps) {
                    *c = f64::from(e);
                }
                acc.add(local.sup(&coef, abs_variant));
            });
            let value = scale * acc.total() / count as f64;
            ComplexityEstimate::exact(Quantity::Rademacher, value, count, config, abs_variant)
        }
        Mode::MonteCarlo => {
            let mc = monte_carlo(
                config,
                || vec![0.0; m],
                |coef, rng| {
                    fill_signs(rng, coef);
                    local.sup(coef, abs_variant)
                },
            );
            ComplexityEstimate::monte_carlo(Quantity::Rademacher, mc, scale, config, abs_variant)
        }
    };
    Ok(est.with_param("m", m as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::lemma3_classes;
    use crate::complexity::test_support::{all, class};
    use crate::config::DEFAULT_ENUMERATION_CAP as CAP;
    use crate::error::Error;
    use crate::numeric::binomial;

    #[test]
    fn singleton_constant_is_zero() {
        for m in [1, 2, 5] {
            let c = class(&[&vec![0.7; m]]);
            let r = rademacher(&c, &all(m), &EstimationConfig::exact(), false).unwrap();
            assert!(r.value.abs() < 1e-15);
            assert_eq!(r.samples, 1 << m);
            assert_eq!(r.std_error, 0.0);
        }
    }

    #[test]
    fn constants_on_four_points() {
        // Oracle: E max{0, (2/4) sum eps} over the 16 sign vectors, written out
        // by the number of +1 entries k: the sum is 2k - 4, so k=3 gives 1
        // (4 ways) and k=4 gives 2 (1 way); k <= 2 gives 0.
        let oracle = (4.0 * 1.0 + 1.0 * 2.0) / 16.0;
        assert_eq!(oracle, 0.375);
        let (fp, _) = lemma3_classes(4, CAP).unwrap();
        let r = rademacher(&fp, &all(4), &EstimationConfig::exact(), false).unwrap();
        assert!((r.value - 0.375).abs() < 1e-15);
        assert!(r.value >= 8f64.powf(-0.5) && r.value <= 1.0);
    }

    #[test]
    fn half_ones_class_closed_form() {
        for m in [2usize, 4, 6, 8] {
            let (_, fpp) = lemma3_classes(m, CAP).unwrap();
            let r = rademacher(&fpp, &all(m), &EstimationConfig::exact(), false).unwrap();
            let expected = 1.0 - binomial(m as u64, m as u64 / 2) as f64 / 2f64.powi(m as i32);
            assert!((r.value - expected).abs() < 1e-12, "m={m}: {} vs {expected}", r.value);
        }
    }

    #[test]
    fn cap_and_empty_errors() {
        let c = class(&[&[1.0, 2.0, 3.0]]);
        let cfg = EstimationConfig::exact().with_cap(4);
        assert!(matches!(rademacher(&c, &all(3), &cfg, false), Err(Error::CapExceeded { .. })));
        assert!(rademacher(&c, &[], &EstimationConfig::exact(), false).is_err());
    }

    #[test]
    fn abs_dominates_plain() {
        let c = class(&[&[0.3, -0.2, 0.9, -0.4], &[-0.5, 0.1, 0.2, 0.6]]);
        let cfg = EstimationConfig::exact();
        let plain = rademacher(&c, &all(4), &cfg, false).unwrap().value;
        let abs = rademacher(&c, &all(4), &cfg, true).unwrap().value;
        assert!(abs >= plain);
    }

    #[test]
    fn monte_carlo_is_close() {
        let (fp, _) = lemma3_classes(4, CAP).unwrap();
        let cfg = EstimationConfig::monte_carlo(20_000, 5);
        let r = rademacher(&fp, &all(4), &cfg, false).unwrap();
        assert_eq!(r.samples, 20_000);
        assert!((r.value - 0.375).abs() < 5.0 * r.std_error);
    }
}
