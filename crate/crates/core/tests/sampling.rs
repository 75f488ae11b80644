use std::collections::HashMap;

use prc_core::config::rng_from_seed;
use prc_core::enumerate::for_each_subset;
use prc_core::numeric::binomial;
use prc_core::sampling::{average_on_subset, sample_partition};
use rand::Rng;

#[test]
fn subset_means_average_to_the_population_mean() {
    // Exhaustive over every subset size for N up to 10.
    let mut rng = rng_from_seed(31);
    for n in 2..=10usize {
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let population_mean = values.iter().sum::<f64>() / n as f64;
        for m in 1..n {
            let mut total = 0.0;
            let mut count = 0u32;
            for_each_subset(n, m, |s| {
                total += average_on_subset(&values, s).unwrap();
                count += 1;
            });
            assert_eq!(u128::from(count), binomial(n as u64, m as u64));
            assert!((total / f64::from(count) - population_mean).abs() < 1e-12, "N={n} m={m}");
        }
    }
}

#[test]
fn partitions_are_uniform() {
    let draws = 1_000_000u32;
    for (n, m) in [(6usize, 3usize), (8, 2)] {
        let mut rng = rng_from_seed(n as u64 * 100 + m as u64);
        let mut counts: HashMap<Vec<usize>, u32> = HashMap::new();
        for _ in 0..draws {
            let p = sample_partition(n, m, &mut rng).unwrap();
            assert_eq!(p.train().len() + p.test().len(), n);
            *counts.entry(p.train().to_vec()).or_default() += 1;
        }
        let outcomes = binomial(n as u64, m as u64) as f64;
        assert_eq!(counts.len() as f64, outcomes);
        let p = 1.0 / outcomes;
        let expected = f64::from(draws) * p;
        let sd = (f64::from(draws) * p * (1.0 - p)).sqrt();
        for (subset, &c) in &counts {
            assert!((f64::from(c) - expected).abs() <= 5.0 * sd, "{subset:?}: {c} vs {expected}");
        }
    }
}

#[test]
fn same_seed_same_partition() {
    let a = sample_partition(50, 25, &mut rng_from_seed(9)).unwrap();
    let b = sample_partition(50, 25, &mut rng_from_seed(9)).unwrap();
    assert_eq!(a, b);
}
