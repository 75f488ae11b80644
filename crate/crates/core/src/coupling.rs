//! Coupling between i.i.d. Rademacher vectors and uniform balanced vectors.
//!
//! For a ±1 vector `v` of even length `m` with entry sum `q`, the balanced
//! vectors closest to `v` in Hamming distance are exactly those obtained by
//! flipping `|q|/2` of the entries that share the sign of `q`. The randomized
//! map `t(v)` picks one of them uniformly. If `v` is uniform on `{-1,+1}^m`
//! then `t(v)` is uniform on the balanced vectors.
//!
//! Exact distributions are computed with big rationals; the candidate sets are
//! never materialized except while enumerating a single source vector.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::enumerate::{for_each_sign_vector, for_each_subset, Space};
use crate::error::{Error, Result};
use crate::numeric::binomial;
use crate::sampling::shuffle_prefix;
use crate::signs::{SignKind, SignVector};

/// The nearest-balanced candidate set `T(v)` of a ±1 vector, kept implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedProjection {
    source: SignVector,
    excess: i64,
    candidate_count: u128,
    majority_positions: Vec<usize>,
}

impl BalancedProjection {
    pub fn new(v: &SignVector) -> Result<Self> {
        let m = v.len();
        if m == 0 || m % 2 != 0 {
            return Err(Error::Parity(format!("coupling needs a positive even length, got {m}")));
        }
        if v.entries().contains(&0) {
            return Err(Error::InvalidArgument("coupling source cannot contain zeros".into()));
        }
        let excess = v.excess();
        let majority_positions: Vec<usize> = if excess == 0 {
            Vec::new()
        } else {
            let sign = excess.signum() as i8;
            (0..m).filter(|&i| v.entries()[i] == sign).collect()
        };
        let flips = excess.unsigned_abs() / 2;
        let candidate_count = if excess == 0 {
            1
        } else {
            binomial(majority_positions.len() as u64, flips)
        };
        Ok(Self {
            source: SignVector::new(v.entries().to_vec(), SignKind::Rademacher)?,
            excess,
            candidate_count,
            majority_positions,
        })
    }

    pub fn source(&self) -> &SignVector {
        &self.source
    }

    /// Entry sum `q` of the source; always even.
    pub fn excess(&self) -> i64 {
        self.excess
    }

    /// `|T(v)| = C((m + |q|)/2, |q|/2)`.
    pub fn candidate_count(&self) -> u128 {
        self.candidate_count
    }

    /// Positions whose sign matches the sign of `q`; empty when `q = 0`.
    pub fn majority_positions(&self) -> &[usize] {
        &self.majority_positions
    }

    /// Number of entries flipped to reach any candidate.
    pub fn flips(&self) -> usize {
        (self.excess.unsigned_abs() / 2) as usize
    }

    /// Whether the balanced vector `e` belongs to `T(v)`.
    pub fn contains(&self, e: &[i8]) -> bool {
        let v = self.source.entries();
        if e.len() != v.len() || crate::signs::excess(e) != 0 || e.contains(&0) {
            return false;
        }
        let sign = self.excess.signum() as i8;
        // Every disagreement must be a majority entry being flipped; balance
        // of `e` then forces exactly |q|/2 of them.
        v.iter().zip(e).all(|(&a, &b)| a == b || a == sign)
    }

    /// Calls `visit` with every candidate in `T(v)`.
    pub fn for_each_candidate(&self, mut visit: impl FnMut(&[i8])) {
        let mut e = self.source.entries().to_vec();
        if self.excess == 0 {
            visit(&e);
            return;
        }
        let base = e.clone();
        for_each_subset(self.majority_positions.len(), self.flips(), |chosen| {
            e.copy_from_slice(&base);
            for &c in chosen {
                let i = self.majority_positions[c];
                e[i] = -e[i];
            }
            visit(&e);
        });
    }
}

/// The coupling map `t(v)`: flips a uniformly chosen `|q|/2`-subset of the
/// majority-sign entries, consuming randomness from `rng`.
pub fn couple<R: Rng + ?Sized>(v: &SignVector, rng: &mut R) -> Result<SignVector> {
    let proj = BalancedProjection::new(v)?;
    let mut entries = v.entries().to_vec();
    let mut positions = proj.majority_positions.clone();
    let flips = proj.flips();
    shuffle_prefix(&mut positions, flips, rng);
    for &i in &positions[..flips] {
        entries[i] = -entries[i];
    }
    SignVector::balanced(entries)
}

/// Exact law of `t(eps)` for uniform `eps` on `{-1,+1}^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingDistribution {
    pub m: usize,
    /// Balanced vectors in enumeration order with their probabilities.
    pub entries: Vec<(Vec<i8>, BigRational)>,
}

impl CouplingDistribution {
    pub fn total(&self) -> BigRational {
        self.entries.iter().map(|(_, p)| p.clone()).sum()
    }

    pub fn probabilities_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, p)| to_f64(p)).collect()
    }
}

fn check_coupling_size(m: usize, cap: u64) -> Result<()> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::Parity(format!("coupling needs a positive even length, got {m}")));
    }
    Space::SignVectors { m }.checked_count(cap)?;
    Space::BalancedVectors { m }.checked_count(cap)?;
    Ok(())
}

/// Big-integer `2^m`.
fn pow2(m: usize) -> BigInt {
    BigInt::one() << m
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("probabilities are finite")
}

/// `P(t(eps) = e) = sum_v 2^-m [e in T(v)] / |T(v)|` for every balanced `e`,
/// computed exactly.
pub fn coupling_distribution(m: usize, cap: u64) -> Result<CouplingDistribution> {
    check_coupling_size(m, cap)?;
    let mut index: BTreeMap<Vec<i8>, usize> = BTreeMap::new();
    let mut order: Vec<Vec<i8>> = Vec::new();
    crate::enumerate::for_each_balanced_vector(m, |e| {
        index.insert(e.to_vec(), order.len());
        order.push(e.to_vec());
    });
    // hits[e][|T|] = number of sources v with e in T(v) and that |T(v)|.
    let mut hits: Vec<BTreeMap<u128, u64>> = vec![BTreeMap::new(); order.len()];
    for_each_sign_vector(m, |v| {
        let proj = BalancedProjection::new(&SignVector::rademacher(v.to_vec()).expect("cube vector"))
            .expect("even length");
        let size = proj.candidate_count();
        proj.for_each_candidate(|e| {
            *hits[index[e]].entry(size).or_default() += 1;
        });
    });
    let denom = pow2(m);
    let entries = order
        .into_iter()
        .zip(hits)
        .map(|(e, by_size)| {
            let mut p = BigRational::zero();
            for (size, count) in by_size {
                p += BigRational::new(BigInt::from(count), BigInt::from(size) * &denom);
            }
            (e, p)
        })
        .collect();
    Ok(CouplingDistribution { m, entries })
}

/// `1 - 2^-m C(m, m/2)` as an exact rational.
pub fn conditional_factor(m: usize) -> BigRational {
    BigRational::one() - BigRational::new(big_binomial(m as u64, m as u64 / 2), pow2(m))
}

/// Conditional expectation of each Rademacher sign given the coupled vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalExpectation {
    pub m: usize,
    pub e: Vec<i8>,
    /// `E[eps_q | t(eps) = e]` by exhaustive enumeration, one per coordinate.
    pub enumerated: Vec<BigRational>,
    /// `(1 - 2^-m C(m, m/2)) e_q`, one per coordinate.
    pub closed_form: Vec<BigRational>,
    /// The factor `1 - 2^-m C(m, m/2)`.
    pub factor: BigRational,
    /// The lower bound `1 - 2 (2 pi m)^{-1/2}` on the factor.
    pub factor_lower_bound: f64,
}

impl ConditionalExpectation {
    pub fn max_abs_gap(&self) -> f64 {
        self.enumerated
            .iter()
            .zip(&self.closed_form)
            .map(|(a, b)| to_f64(&(a - b).abs()))
            .fold(0.0, f64::max)
    }

    pub fn enumerated_f64(&self) -> Vec<f64> {
        self.enumerated.iter().map(to_f64).collect()
    }
}

/// Enumerates every `(eps, tie-break)` pair to get `E[eps_q | t(eps) = e]` for
/// all coordinates `q`, alongside the closed form.
pub fn conditional_sign_expectation(e: &SignVector, cap: u64) -> Result<ConditionalExpectation> {
    let m = e.len();
    check_coupling_size(m, cap)?;
    if !e.is_balanced() {
        return Err(Error::InvalidArgument("conditioning vector must be balanced".into()));
    }
    let target = e.entries();
    // For each candidate-set size: sum of v over sources hitting e, and their count.
    let mut sums: BTreeMap<u128, (Vec<i64>, i64)> = BTreeMap::new();
    for_each_sign_vector(m, |v| {
        let proj = BalancedProjection::new(&SignVector::rademacher(v.to_vec()).expect("cube vector"))
            .expect("even length");
        if proj.contains(target) {
            let slot = sums
                .entry(proj.candidate_count())
                .or_insert_with(|| (vec![0; m], 0));
            for (acc, &s) in slot.0.iter_mut().zip(v) {
                *acc += i64::from(s);
            }
            slot.1 += 1;
        }
    });
    let mut numer = vec![BigRational::zero(); m];
    let mut mass = BigRational::zero();
    for (size, (vsum, count)) in sums {
        let size = BigInt::from(size);
        mass += BigRational::new(BigInt::from(count), size.clone());
        for (n, s) in numer.iter_mut().zip(vsum) {
            *n += BigRational::new(BigInt::from(s), size.clone());
        }
    }
    let enumerated = numer.into_iter().map(|n| n / &mass).collect();
    let factor = conditional_factor(m);
    let closed_form = target
        .iter()
        .map(|&t| &factor * BigRational::from_integer(BigInt::from(t)))
        .collect();
    Ok(ConditionalExpectation {
        m,
        e: target.to_vec(),
        enumerated,
        closed_form,
        factor,
        factor_lower_bound: 1.0 - 2.0 / (2.0 * std::f64::consts::PI * m as f64).sqrt(),
    })
}

/// `C(n, k)` as a big integer.
pub fn big_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `sum_{j=1}^{n} C(n-1, n-j) / C(n+j, j)` in exact arithmetic; equals 1/2
/// for every `n >= 1`.
pub fn induction_identity(n: u64) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidArgument("induction identity needs n >= 1".into()));
    }
    Ok((1..=n)
        .map(|j| BigRational::new(big_binomial(n - 1, n - j), big_binomial(n + j, j)))
        .sum())
}

/// Exact `E|eps_1 + .. + eps_m|` against the Khinchin bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KhinchinCheck {
    pub m: usize,
    pub expectation: f64,
    /// `sqrt(m)`
    pub upper: f64,
    /// `sqrt(m / 2)`
    pub lower: f64,
}

impl KhinchinCheck {
    pub fn holds(&self) -> bool {
        let tol = crate::numeric::INEQUALITY_TOL;
        self.lower <= self.expectation + tol && self.expectation <= self.upper + tol
    }
}

pub fn khinchin_check(m: usize, cap: u64) -> Result<KhinchinCheck> {
    if m == 0 {
        return Err(Error::InvalidSize("khinchin check needs m >= 1".into()));
    }
    let count = Space::SignVectors { m }.checked_count(cap)?;
    let mut total: u128 = 0;
    for_each_sign_vector(m, |v| {
        total += crate::signs::excess(v).unsigned_abs() as u128;
    });
    let expectation = to_f64(&BigRational::new(BigInt::from(total), BigInt::from(count)));
    Ok(KhinchinCheck {
        m,
        expectation,
        upper: (m as f64).sqrt(),
        lower: (m as f64 / 2.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{rng_from_seed, DEFAULT_ENUMERATION_CAP as CAP};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn balanced_source_is_fixed() {
        let v = SignVector::rademacher(vec![1, -1]).unwrap();
        let mut rng = rng_from_seed(0);
        assert_eq!(couple(&v, &mut rng).unwrap().entries(), [1, -1]);
        let p = BalancedProjection::new(&v).unwrap();
        assert_eq!(p.candidate_count(), 1);
        assert_eq!(p.excess(), 0);
    }

    #[test]
    fn two_plus_signs_split_evenly() {
        let v = SignVector::rademacher(vec![1, 1]).unwrap();
        let mut rng = rng_from_seed(4);
        let draws = 20_000;
        let first = (0..draws)
            .filter(|_| couple(&v, &mut rng).unwrap().entries() == [1, -1])
            .count();
        assert!((first as f64 - 10_000.0).abs() < 5.0 * 70.8);
        let p = BalancedProjection::new(&v).unwrap();
        assert_eq!(p.candidate_count(), 2);
        assert_eq!(p.majority_positions(), [0, 1]);
    }

    #[test]
    fn m2_marginal_by_hand() {
        // (+,-) and (-,+) map to themselves; (+,+) and (-,-) split evenly.
        let d = coupling_distribution(2, CAP).unwrap();
        let hand = rat(1, 4) + rat(1, 4) * rat(1, 2) + rat(1, 4) * rat(1, 2);
        assert_eq!(hand, rat(1, 2));
        for (_, p) in &d.entries {
            assert_eq!(*p, hand);
        }
    }

    #[test]
    fn distribution_is_uniform() {
        for m in [4usize, 6, 8] {
            let d = coupling_distribution(m, CAP).unwrap();
            let u = BigRational::new(1.into(), big_binomial(m as u64, m as u64 / 2));
            assert!(d.entries.iter().all(|(_, p)| *p == u));
            assert_eq!(d.total(), BigRational::one());
        }
    }

    #[test]
    fn couple_properties() {
        let mut rng = rng_from_seed(12);
        for _ in 0..500 {
            let m = 2 * rng.gen_range(1..8);
            let entries: Vec<i8> = (0..m).map(|_| if rng.gen() { 1 } else { -1 }).collect();
            let v = SignVector::rademacher(entries.clone()).unwrap();
            let proj = BalancedProjection::new(&v).unwrap();
            let out = couple(&v, &mut rng).unwrap();
            assert!(out.is_balanced());
            assert!(proj.contains(out.entries()));
            let flipped: Vec<usize> = (0..m).filter(|&i| out.entries()[i] != entries[i]).collect();
            assert_eq!(flipped.len() as i64, v.excess().abs() / 2);
            assert!(flipped.iter().all(|i| proj.majority_positions().contains(i)));
        }
    }

    #[test]
    fn candidate_count_matches_enumeration() {
        for_each_sign_vector(8, |v| {
            let p = BalancedProjection::new(&SignVector::rademacher(v.to_vec()).unwrap()).unwrap();
            let mut n = 0u128;
            p.for_each_candidate(|_| n += 1);
            assert_eq!(n, p.candidate_count());
            assert_eq!(p.excess() % 2, 0);
        });
    }

    #[test]
    fn lemma6_m2() {
        let e = SignVector::balanced(vec![1, -1]).unwrap();
        let c = conditional_sign_expectation(&e, CAP).unwrap();
        assert_eq!(c.factor, rat(1, 2));
        assert_eq!(c.enumerated[0], rat(1, 2));
        assert_eq!(c.enumerated, c.closed_form);
    }

    #[test]
    fn lemma6_ratio_is_constant() {
        for m in [2usize, 4, 6, 8] {
            let factor = conditional_factor(m);
            crate::enumerate::for_each_balanced_vector(m, |e| {
                let c = conditional_sign_expectation(&SignVector::balanced(e.to_vec()).unwrap(), CAP).unwrap();
                for (q, val) in c.enumerated.iter().enumerate() {
                    assert_eq!(val / BigRational::from_integer(e[q].into()), factor);
                }
                assert!(to_f64(&c.factor) >= c.factor_lower_bound);
            });
        }
    }

    #[test]
    fn conditional_rejects_unbalanced() {
        let e = SignVector::new(vec![1, 1], SignKind::Transductive).unwrap();
        assert!(conditional_sign_expectation(&e, CAP).is_err());
    }

    #[test]
    fn induction_small_cases() {
        assert_eq!(induction_identity(1).unwrap(), rat(1, 2));
        // 1/3 + 1/6
        assert_eq!(rat(1, 3) + rat(1, 6), rat(1, 2));
        assert_eq!(induction_identity(2).unwrap(), rat(1, 2));
        assert_eq!(induction_identity(25).unwrap(), rat(1, 2));
        assert!(induction_identity(0).is_err());
    }

    #[test]
    fn khinchin_small_cases() {
        // m=2: |S| is 0 or 2 with probability 1/2 each.
        let k = khinchin_check(2, CAP).unwrap();
        assert_eq!(k.expectation, 1.0);
        assert!(k.holds());
        // m=4: |S| = 4 (2 ways), 2 (8 ways), 0 (6 ways) -> 24/16.
        let k = khinchin_check(4, CAP).unwrap();
        assert_eq!(k.expectation, 1.5);
        assert_eq!(k.upper, 2.0);
        for m in (2..=14).step_by(2) {
            assert!(khinchin_check(m, CAP).unwrap().holds(), "m={m}");
        }
    }

    #[test]
    fn odd_length_rejected() {
        assert!(matches!(coupling_distribution(3, CAP), Err(Error::Parity(_))));
        let v = SignVector::rademacher(vec![1, 1, -1]).unwrap();
        assert!(matches!(couple(&v, &mut rng_from_seed(0)), Err(Error::Parity(_))));
    }
}
