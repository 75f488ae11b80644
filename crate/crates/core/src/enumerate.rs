//! Exhaustive enumeration of the finite outcome spaces behind every exact
//! estimator.
//!
//! Orders are fixed and documented:
//!
//! * `subsets(n, k)`: lexicographic order of increasing index lists, starting
//!   at `[0, 1, .., k-1]`.
//! * `sign_vectors(m)`: binary counting with entry 0 as the least significant
//!   digit; a 0 bit is `+1`, a 1 bit is `-1`. The first vector is all `+1`.
//! * `balanced_vectors(m)`: the `+1` positions run through `subsets(m, m/2)`.
//! * `ternary_vectors(n)`: base-3 counting with entry 0 least significant and
//!   digits ordered `-1, 0, +1`. The first vector is all `-1`.
//!
//! The cursor types step in place without allocating; the iterator wrappers
//! clone each outcome.

use crate::error::{Error, Result};
use crate::numeric::{binomial, saturating_pow};
use crate::signs::{SignKind, SignVector};

/// One of the four enumerable outcome spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Subsets { n: usize, k: usize },
    SignVectors { m: usize },
    BalancedVectors { m: usize },
    TernaryVectors { n: usize },
}

impl Space {
    /// Number of outcomes, saturating at `u128::MAX`.
    pub fn count(&self) -> u128 {
        match *self {
            Space::Subsets { n, k } => binomial(n as u64, k as u64),
            Space::SignVectors { m } => saturating_pow(2, m as u64),
            Space::BalancedVectors { m } => binomial(m as u64, (m / 2) as u64),
            Space::TernaryVectors { n } => saturating_pow(3, n as u64),
        }
    }

    /// Validates the space against `cap` and returns its size.
    pub fn checked_count(&self, cap: u64) -> Result<u128> {
        match *self {
            Space::BalancedVectors { m } if m % 2 != 0 => {
                return Err(Error::Parity(format!(
                    "balanced vectors need even length, got {m}"
                )))
            }
            Space::Subsets { n, k } if k > n => {
                return Err(Error::InvalidSize(format!(
                    "cannot choose {k} of {n} points"
                )))
            }
            _ => {}
        }
        let count = self.count();
        if count > u128::from(cap) {
            return Err(Error::CapExceeded { count, cap });
        }
        Ok(count)
    }
}

/// Lexicographic `k`-combinations of `0..n`.
#[derive(Debug, Clone)]
pub struct Combination {
    n: usize,
    idx: Vec<usize>,
}

impl Combination {
    pub fn first(n: usize, k: usize) -> Self {
        debug_assert!(k <= n);
        Self {
            n,
            idx: (0..k).collect(),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.idx
    }

    /// Steps to the next combination; `false` once the last was passed.
    pub fn advance(&mut self) -> bool {
        let k = self.idx.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

/// Calls `visit` with every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    let mut c = Combination::first(n, k);
    loop {
        visit(c.as_slice());
        if !c.advance() {
            break;
        }
    }
}

/// Odometer over `{-1, +1}^m` or `{-1, 0, +1}^m`.
#[derive(Debug, Clone)]
pub struct SignCursor {
    entries: Vec<i8>,
    ternary: bool,
}

impl SignCursor {
    pub fn binary(m: usize) -> Self {
        Self {
            entries: vec![1; m],
            ternary: false,
        }
    }

    pub fn ternary(n: usize) -> Self {
        Self {
            entries: vec![-1; n],
            ternary: true,
        }
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.entries
    }

    pub fn advance(&mut self) -> bool {
        for e in self.entries.iter_mut() {
            if self.ternary {
                if *e < 1 {
                    *e += 1;
                    return true;
                }
                *e = -1;
            } else {
                if *e == 1 {
                    *e = -1;
                    return true;
                }
                *e = 1;
            }
        }
        false
    }
}

/// Calls `visit` with every ±1 vector of length `m`.
pub fn for_each_sign_vector(m: usize, mut visit: impl FnMut(&[i8])) {
    let mut c = SignCursor::binary(m);
    loop {
        visit(c.as_slice());
        if !c.advance() {
            break;
        }
    }
}

/// Calls `visit` with every vector in `{-1, 0, +1}^n`.
pub fn for_each_ternary_vector(n: usize, mut visit: impl FnMut(&[i8])) {
    let mut c = SignCursor::ternary(n);
    loop {
        visit(c.as_slice());
        if !c.advance() {
            break;
        }
    }
}

/// Calls `visit` with every balanced ±1 vector of even length `m`.
pub fn for_each_balanced_vector(m: usize, mut visit: impl FnMut(&[i8])) {
    let mut v = vec![-1i8; m];
    for_each_subset(m, m / 2, |plus| {
        v.fill(-1);
        for &i in plus {
            v[i] = 1;
        }
        visit(&v);
    });
}

/// Probability of `entries` when each coordinate is `±1` with probability `p`
/// and `0` with probability `1 - 2p`.
pub fn ternary_weight(entries: &[i8], p: f64) -> f64 {
    let nonzero = entries.iter().filter(|&&e| e != 0).count();
    p.powi(nonzero as i32) * (1.0 - 2.0 * p).powi((entries.len() - nonzero) as i32)
}

/// Iterator over `k`-subsets; each outcome has weight `1 / C(n, k)`.
#[derive(Debug, Clone)]
pub struct Subsets {
    cursor: Combination,
    started: bool,
    done: bool,
    count: u128,
}

impl Subsets {
    pub fn weight(&self) -> f64 {
        1.0 / self.count as f64
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.started && !self.cursor.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(self.cursor.as_slice().to_vec())
    }
}

/// Iterator over sign vectors of one of the three kinds.
#[derive(Debug, Clone)]
pub struct SignVectors {
    inner: SignVectorsInner,
    started: bool,
    done: bool,
    count: u128,
}

#[derive(Debug, Clone)]
enum SignVectorsInner {
    Cube(SignCursor, SignKind),
    Balanced(Combination, usize),
}

impl SignVectors {
    /// Uniform weight `1 / count`; ternary outcomes use [`ternary_weight`].
    pub fn uniform_weight(&self) -> f64 {
        1.0 / self.count as f64
    }

    pub fn count(&self) -> u128 {
        self.count
    }
}

impl Iterator for SignVectors {
    type Item = SignVector;

    fn next(&mut self) -> Option<SignVector> {
        if self.done {
            return None;
        }
        if self.started {
            let moved = match &mut self.inner {
                SignVectorsInner::Cube(c, _) => c.advance(),
                SignVectorsInner::Balanced(c, _) => c.advance(),
            };
            if !moved {
                self.done = true;
                return None;
            }
        }
        self.started = true;
        let v = match &self.inner {
            SignVectorsInner::Cube(c, kind) => SignVector::new(c.as_slice().to_vec(), *kind),
            SignVectorsInner::Balanced(c, m) => {
                let mut e = vec![-1i8; *m];
                for &i in c.as_slice() {
                    e[i] = 1;
                }
                SignVector::balanced(e)
            }
        };
        Some(v.expect("enumerated vectors satisfy their kind"))
    }
}

pub fn subsets(n: usize, k: usize, cap: u64) -> Result<Subsets> {
    let count = Space::Subsets { n, k }.checked_count(cap)?;
    Ok(Subsets {
        cursor: Combination::first(n, k),
        started: false,
        done: false,
        count,
    })
}

pub fn sign_vectors(m: usize, cap: u64) -> Result<SignVectors> {
    let count = Space::SignVectors { m }.checked_count(cap)?;
    Ok(SignVectors {
        inner: SignVectorsInner::Cube(SignCursor::binary(m), SignKind::Rademacher),
        started: false,
        done: false,
        count,
    })
}

pub fn balanced_vectors(m: usize, cap: u64) -> Result<SignVectors> {
    let count = Space::BalancedVectors { m }.checked_count(cap)?;
    Ok(SignVectors {
        inner: SignVectorsInner::Balanced(Combination::first(m, m / 2), m),
        started: false,
        done: false,
        count,
    })
}

pub fn ternary_vectors(n: usize, cap: u64) -> Result<SignVectors> {
    let count = Space::TernaryVectors { n }.checked_count(cap)?;
    Ok(SignVectors {
        inner: SignVectorsInner::Cube(SignCursor::ternary(n), SignKind::Transductive),
        started: false,
        done: false,
        count,
    })
}
