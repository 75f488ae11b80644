//! Summation, binomial counts and comparison tolerances.

/// Slack allowed when checking an inequality that holds exactly on paper.
pub const INEQUALITY_TOL: f64 = 1e-9;
/// Slack allowed when checking an exact identity.
pub const IDENTITY_TOL: f64 = 1e-12;

const BLOCK: usize = 32;

/// Pairwise (cascade) sum of a slice.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Streaming pairwise summation.
///
/// Values are summed naively in blocks of 32; block totals are merged like a
/// binary counter so the rounding error grows with the log of the count.
#[derive(Debug, Clone, Default)]
pub struct PairwiseSum {
    block: f64,
    in_block: usize,
    // (level, partial sum); levels strictly decrease towards the top.
    stack: Vec<(u32, f64)>,
}

impl PairwiseSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        self.block += x;
        self.in_block += 1;
        if self.in_block == BLOCK {
            self.push_block();
        }
    }

    fn push_block(&mut self) {
        let mut level = 0;
        let mut value = self.block;
        while let Some(&(top_level, top)) = self.stack.last() {
            if top_level != level {
                break;
            }
            self.stack.pop();
            value += top;
            level += 1;
        }
        self.stack.push((level, value));
        self.block = 0.0;
        self.in_block = 0;
    }

    pub fn total(&self) -> f64 {
        let mut acc = self.block;
        for &(_, partial) in self.stack.iter().rev() {
            acc += partial;
        }
        acc
    }
}

impl Extend<f64> for PairwiseSum {
    fn extend<T: IntoIterator<Item = f64>>(&mut self, iter: T) {
        for x in iter {
            self.add(x);
        }
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        let num = u128::from(n - i);
        let den = u128::from(i + 1);
        let g = gcd(acc, den);
        let (a, d) = (acc / g, den / g);
        match (a.checked_mul(num / d), num % d) {
            (Some(v), 0) => acc = v,
            _ => match a.checked_mul(num) {
                Some(v) => acc = v / d,
                None => return u128::MAX,
            },
        }
    }
    acc
}

/// `base^exp`, saturating at `u128::MAX`.
pub fn saturating_pow(base: u128, exp: u64) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(10, 5), 252);
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(100, 50), 100_891_344_545_564_193_334_812_497_256);
        assert_eq!(binomial(400, 200), u128::MAX);
    }

    #[test]
    fn pow_saturates() {
        assert_eq!(saturating_pow(3, 10), 59049);
        assert_eq!(saturating_pow(3, 200), u128::MAX);
    }

    #[test]
    fn streaming_matches_slice_sum_on_integers() {
        let xs: Vec<f64> = (0..10_000).map(|i| i as f64).collect();
        let mut acc = PairwiseSum::new();
        acc.extend(xs.iter().copied());
        assert_eq!(acc.total(), 49_995_000.0);
        assert_eq!(pairwise_sum(&xs), 49_995_000.0);
    }

    #[test]
    fn pairwise_beats_naive_on_small_increments() {
        let xs = vec![0.1; 1 << 20];
        let mut acc = PairwiseSum::new();
        acc.extend(xs.iter().copied());
        let exact = 104_857.6;
        assert!((acc.total() - exact).abs() < 1e-8);
        assert!((pairwise_sum(&xs) - exact).abs() < 1e-8);
    }
}
