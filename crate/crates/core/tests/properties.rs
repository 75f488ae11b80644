use prc_core::classes::FunctionClass;
use prc_core::complexity::{empirical_process_sup, expected_discrepancy, expected_prc, prc, rademacher, trc};
use prc_core::config::EstimationConfig;
use proptest::prelude::*;

fn class_strategy(max_rows: usize) -> impl Strategy<Value = FunctionClass> {
    (1..=max_rows, 2..=4usize).prop_flat_map(|(rows, half)| {
        prop::collection::vec(prop::collection::vec(-1.0f64..=1.0, 2 * half), rows)
            .prop_map(|r| FunctionClass::new(r, Some(1.0), "prop").unwrap())
    })
}

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// The five averaged quantities at `m = N/2`, `n = m/2` (rounded up).
fn quantities(c: &FunctionClass, abs: bool) -> Vec<f64> {
    let cfg = EstimationConfig::exact();
    let n_pts = c.num_points();
    let pts = all(n_pts);
    let m = n_pts / 2;
    let mut v = vec![
        rademacher(c, &pts, &cfg, abs).unwrap().value,
        prc(c, &pts, m, &cfg, abs).unwrap().value,
        empirical_process_sup(c, &pts, m, &cfg, abs).unwrap().value,
    ];
    if m >= 2 {
        v.push(expected_prc(c, &pts, m, m.div_ceil(2), &cfg, abs).unwrap().value);
    }
    if !abs {
        v.push(trc(c, &pts, m, n_pts - m, 0.25, &cfg).unwrap().value);
        v.push(expected_discrepancy(c, &pts, &cfg).unwrap().value);
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantities_are_nonnegative(c in class_strategy(5), abs in any::<bool>()) {
        for q in quantities(&c, abs) {
            prop_assert!(q >= -1e-12, "{q}");
        }
    }

    #[test]
    fn growing_the_class_never_decreases(c in class_strategy(4), extra in class_strategy(3)) {
        prop_assume!(extra.num_points() == c.num_points());
        let bigger = c.with_rows(&extra).unwrap();
        for abs in [false, true] {
            for (small, big) in quantities(&c, abs).into_iter().zip(quantities(&bigger, abs)) {
                prop_assert!(big >= small - 1e-12);
            }
        }
    }

    #[test]
    fn positively_homogeneous(c in class_strategy(4), scale in 0.0f64..5.0) {
        let scaled = c.scaled(scale).unwrap();
        for abs in [false, true] {
            for (a, b) in quantities(&c, abs).into_iter().zip(quantities(&scaled, abs)) {
                prop_assert!((scale * a - b).abs() <= 1e-12 * (1.0 + scale));
            }
        }
    }

    #[test]
    fn absolute_variant_dominates(c in class_strategy(5)) {
        let plain = quantities(&c, false);
        let abs = quantities(&c, true);
        for (p, a) in plain.iter().zip(&abs) {
            prop_assert!(a >= &(p - 1e-12));
        }
    }

    #[test]
    fn common_shift_leaves_permutational_complexity_unchanged(c in class_strategy(4), shift in -3.0f64..3.0) {
        let rows: Vec<Vec<f64>> = c.rows().map(|r| r.iter().map(|v| v + shift).collect()).collect();
        let moved = FunctionClass::new(rows, None, "shifted").unwrap();
        let pts = all(c.num_points());
        let cfg = EstimationConfig::exact();
        for n in 1..pts.len() {
            let a = prc(&c, &pts, n, &cfg, false).unwrap().value;
            let b = prc(&moved, &pts, n, &cfg, false).unwrap().value;
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn permutational_vs_rademacher_sandwich(c in class_strategy(6)) {
        // Any even-size set: Q <= (1 + 2/(sqrt(2 pi k) - 2)) R and |Q - R| <= 2B/sqrt(k).
        let k = c.num_points();
        let pts = all(k);
        let cfg = EstimationConfig::exact();
        let factor = 1.0 + 2.0 / ((2.0 * std::f64::consts::PI * k as f64).sqrt() - 2.0);
        for abs in [false, true] {
            let q = prc(&c, &pts, k / 2, &cfg, abs).unwrap().value;
            let r = rademacher(&c, &pts, &cfg, abs).unwrap().value;
            prop_assert!(q <= factor * r + 1e-9);
            prop_assert!((q - r).abs() <= 2.0 * c.bound() / (k as f64).sqrt() + 1e-9);
        }
    }

    #[test]
    fn monte_carlo_is_reproducible(c in class_strategy(3), seed in any::<u64>(), workers in 1usize..4) {
        let pts = all(c.num_points());
        let cfg = EstimationConfig::monte_carlo(257, seed).with_workers(workers);
        let a = prc(&c, &pts, 1, &cfg, false).unwrap();
        let b = prc(&c, &pts, 1, &cfg, false).unwrap();
        prop_assert_eq!(a, b);
    }
}
