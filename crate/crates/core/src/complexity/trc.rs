use rand::Rng;

use crate::classes::FunctionClass;
use crate::config::{monte_carlo, EstimationConfig, Mode};
use crate::enumerate::{for_each_ternary_vector, ternary_weight, Space};
use crate::error::{Error, Result};
use crate::numeric::PairwiseSum;

use super::{ComplexityEstimate, Gathered, Quantity};

/// Transductive Rademacher complexity
/// `(1/m + 1/u) E_sigma max_f sum_i sigma_i f(x_i)` over the `N = m + u`
/// points, where the `sigma_i` are i.i.d. with `P(+1) = P(-1) = p` and
/// `P(0) = 1 - 2p`.
///
/// Exact mode sums all `3^N` ternary vectors with their product weights.
pub fn trc(
    class: &FunctionClass,
    points: &[usize],
    m: usize,
    u: usize,
    p: f64,
    config: &EstimationConfig,
) -> Result<ComplexityEstimate> {
    config.validate()?;
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} lies outside [0, 1/2]")));
    }
    if m == 0 || u == 0 {
        return Err(Error::InvalidSize(format!("m and u must be positive, got m = {m}, u = {u}")));
    }
    if m + u != points.len() {
        return Err(Error::InvalidSize(format!(
            "m + u = {} does not match the {} points",
            m + u,
            points.len()
        )));
    }
    let local = Gathered::new(class, points)?;
    let big_n = local.width();
    let scale = 1.0 / m as f64 + 1.0 / u as f64;
    let est = match config.mode {
        Mode::Exact => {
            let count = Space::TernaryVectors { n: big_n }.checked_count(config.enumeration_cap)?;
            let mut coef = vec![0.0; big_n];
            let mut acc = PairwiseSum::new();
            for_each_ternary_vector(big_n, |sigma| {
                let w = ternary_weight(sigma, p);
                if w == 0.0 {
                    return;
                }
                for (c, &s) in coef.iter_mut().zip(sigma) {
                    *c = f64::from(s);
                }
                acc.add(w * local.sup(&coef, false));
            });
            ComplexityEstimate::exact(Quantity::Trc, scale * acc.total(), count, config, false)
        }
        Mode::MonteCarlo => {
            let mc = monte_carlo(
                config,
                || vec![0.0; big_n],
                |coef, rng| {
                    for c in coef.iter_mut() {
                        let r: f64 = rng.gen();
                        *c = if r < p {
                            -1.0
                        } else if r < 2.0 * p {
                            1.0
                        } else {
                            0.0
                        };
                    }
                    local.sup(coef, false)
                },
            );
            ComplexityEstimate::monte_carlo(Quantity::Trc, mc, scale, config, false)
        }
    };
    Ok(est
        .with_param("m", m as f64)
        .with_param("u", u as f64)
        .with_param("p", p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::random_class;
    use crate::complexity::rademacher;
    use crate::complexity::test_support::{all, class};
    use crate::config::rng_from_seed;

    #[test]
    fn p_zero_is_zero() {
        let c = random_class(4, 6, 1.0, &mut rng_from_seed(1)).unwrap();
        let v = trc(&c, &all(6), 3, 3, 0.0, &EstimationConfig::exact()).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn zero_class_is_zero() {
        let c = class(&[&[0.0; 5], &[0.0; 5]]);
        for p in [0.1, 0.25, 0.5] {
            assert_eq!(trc(&c, &all(5), 2, 3, p, &EstimationConfig::exact()).unwrap().value, 0.0);
        }
    }

    #[test]
    fn lemma2_sandwich_on_random_classes() {
        let cfg = EstimationConfig::exact();
        for seed in 0..20 {
            let mut rng = rng_from_seed(seed);
            let n = [4, 6, 8][seed as usize % 3];
            let c = random_class(1 + seed as usize % 5, n, 1.0, &mut rng).unwrap();
            let t = trc(&c, &all(n), n / 2, n / 2, 0.25, &cfg).unwrap().value;
            let r = rademacher(&c, &all(n), &cfg, false).unwrap().value;
            assert!(r <= t + 1e-9 && t <= 2.0 * r + 1e-9, "seed {seed}: {r} {t}");
        }
    }

    #[test]
    fn p_half_equals_rademacher_scaled() {
        // With p = 1/2 the signs are Rademacher: TRC = (1/m + 1/u) (N/2) R_N.
        let c = random_class(3, 6, 1.0, &mut rng_from_seed(4)).unwrap();
        let cfg = EstimationConfig::exact();
        let t = trc(&c, &all(6), 2, 4, 0.5, &cfg).unwrap().value;
        let r = rademacher(&c, &all(6), &cfg, false).unwrap().value;
        assert!((t - (0.5 + 0.25) * 3.0 * r).abs() < 1e-12);
    }

    #[test]
    fn argument_errors() {
        let c = class(&[&[1.0, 2.0, 3.0, 4.0]]);
        let cfg = EstimationConfig::exact();
        assert!(trc(&c, &all(4), 2, 2, 0.6, &cfg).is_err());
        assert!(trc(&c, &all(4), 2, 2, -0.1, &cfg).is_err());
        assert!(matches!(trc(&c, &all(4), 1, 2, 0.25, &cfg), Err(Error::InvalidSize(_))));
        assert!(matches!(
            trc(&c, &all(4), 2, 2, 0.25, &cfg.with_cap(80)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn monte_carlo_agrees() {
        let c = random_class(3, 6, 1.0, &mut rng_from_seed(4)).unwrap();
        let exact = trc(&c, &all(6), 3, 3, 0.25, &EstimationConfig::exact()).unwrap().value;
        let mc = trc(&c, &all(6), 3, 3, 0.25, &EstimationConfig::monte_carlo(40_000, 9)).unwrap();
        assert!((mc.value - exact).abs() < 5.0 * mc.std_error);
    }
}
