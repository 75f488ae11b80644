//! Finite point sets, train/test partitions and uniform sampling without
//! replacement.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// The population `{0, .., N-1}`; points are identified by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSet {
    size: usize,
}

impl PointSet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidSize(format!(
                "a point set needs at least 2 points, got {size}"
            )));
        }
        Ok(Self { size })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ids(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn all(&self) -> Vec<usize> {
        self.ids().collect()
    }
}

/// A split of `{0, .., N-1}` into disjoint train and test index sets, both
/// stored in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    train: Vec<usize>,
    test: Vec<usize>,
}

impl Partition {
    /// Builds the partition whose train side is `train`; the test side is the
    /// complement in `{0, .., population-1}`.
    pub fn from_train(population: usize, train: &[usize]) -> Result<Self> {
        let mut in_train = vec![false; population];
        for &i in train {
            if i >= population {
                return Err(Error::InvalidArgument(format!(
                    "train index {i} out of range for {population} points"
                )));
            }
            if std::mem::replace(&mut in_train[i], true) {
                return Err(Error::InvalidArgument(format!("duplicate train index {i}")));
            }
        }
        let m = train.len();
        if m == 0 || m >= population {
            return Err(Error::InvalidSize(format!(
                "train size must lie in 1..{population}, got {m}"
            )));
        }
        let (train, test): (Vec<usize>, Vec<usize>) = (0..population).partition(|&i| in_train[i]);
        Ok(Self { train, test })
    }

    pub fn train(&self) -> &[usize] {
        &self.train
    }

    pub fn test(&self) -> &[usize] {
        &self.test
    }

    pub fn m(&self) -> usize {
        self.train.len()
    }

    pub fn u(&self) -> usize {
        self.test.len()
    }

    pub fn population(&self) -> usize {
        self.train.len() + self.test.len()
    }
}

/// Moves a uniformly random `k`-subset of `items` into `items[..k]` by a
/// partial Fisher-Yates shuffle.
///
/// Any starting arrangement works, so callers may reuse the buffer between
/// draws without resetting it.
pub fn shuffle_prefix<T, R: Rng + ?Sized>(items: &mut [T], k: usize, rng: &mut R) {
    let len = items.len();
    debug_assert!(k <= len);
    for i in 0..k.min(len.saturating_sub(1)) {
        let j = rng.gen_range(i..len);
        items.swap(i, j);
    }
}

/// Draws a train set of size `m` uniformly without replacement from
/// `{0, .., population-1}`; all `C(N, m)` outcomes are equally likely.
pub fn sample_partition<R: Rng + ?Sized>(
    population: usize,
    m: usize,
    rng: &mut R,
) -> Result<Partition> {
    if m == 0 || m >= population {
        return Err(Error::InvalidSize(format!(
            "train size must satisfy 1 <= m < N, got m = {m}, N = {population}"
        )));
    }
    let mut idx: Vec<usize> = (0..population).collect();
    shuffle_prefix(&mut idx, m, rng);
    let mut train = idx[..m].to_vec();
    let mut test = idx[m..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(Partition { train, test })
}

/// Mean of `values` over the points in `subset`.
pub fn average_on_subset(values: &[f64], subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot average over an empty subset".into(),
        ));
    }
    let picked = subset
        .iter()
        .map(|&i| {
            values.get(i).copied().ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "index {i} out of range for {} values",
                    values.len()
                ))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&picked) / subset.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::rng_from_seed;

    #[test]
    fn averages() {
        assert_eq!(average_on_subset(&[1.0, 1.0, 1.0, 1.0], &[0, 2]).unwrap(), 1.0);
        assert_eq!(average_on_subset(&[0.0, 1.0], &[0, 1]).unwrap(), 0.5);
        // (-1 + 2) / 2
        assert_eq!(average_on_subset(&[3.0, -1.0, 2.0], &[1, 2]).unwrap(), 0.5);
    }

    #[test]
    fn average_errors() {
        assert!(matches!(
            average_on_subset(&[1.0], &[]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            average_on_subset(&[1.0], &[3]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn sample_partition_rejects_bad_sizes() {
        let mut rng = rng_from_seed(0);
        assert!(matches!(sample_partition(5, 5, &mut rng), Err(Error::InvalidSize(_))));
        assert!(matches!(sample_partition(5, 0, &mut rng), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn two_point_population_is_fair() {
        let mut rng = rng_from_seed(11);
        let draws = 20_000;
        let zeros = (0..draws)
            .filter(|_| sample_partition(2, 1, &mut rng).unwrap().train() == [0])
            .count();
        // binomial sd = sqrt(20000 / 4) ~ 70.7
        assert!((zeros as f64 - 10_000.0).abs() < 5.0 * 70.8);
    }

    #[test]
    fn partition_is_disjoint_cover() {
        let mut rng = rng_from_seed(3);
        let p = sample_partition(9, 4, &mut rng).unwrap();
        let mut all: Vec<usize> = p.train().iter().chain(p.test()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..9).collect::<Vec<_>>());
        assert_eq!((p.m(), p.u()), (4, 5));
    }

    #[test]
    fn from_train_validates() {
        assert!(Partition::from_train(4, &[0, 0]).is_err());
        assert!(Partition::from_train(4, &[4]).is_err());
        assert!(Partition::from_train(2, &[0, 1]).is_err());
        let p = Partition::from_train(4, &[3, 1]).unwrap();
        assert_eq!(p.train(), [1, 3]);
        assert_eq!(p.test(), [0, 2]);
    }

    #[test]
    fn point_set_needs_two_points() {
        assert!(PointSet::new(1).is_err());
        assert_eq!(PointSet::new(3).unwrap().all(), vec![0, 1, 2]);
    }
}
