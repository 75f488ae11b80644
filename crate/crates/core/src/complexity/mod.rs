//! The transductive complexity quantities, each available in exact
//! (exhaustive enumeration) and Monte Carlo modes.
//!
//! Every estimator takes the function class, the list of point indices it is
//! evaluated on, and an [`EstimationConfig`]. Suprema over the class are
//! maxima over its rows.

use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::classes::FunctionClass;
use crate::config::{EstimationConfig, McSummary, Mode};
use crate::error::{Error, Result};

mod discrepancy;
mod empirical;
mod prc;
mod rademacher;
mod trc;

pub use discrepancy::{expected_discrepancy, max_discrepancy};
pub use empirical::empirical_process_sup;
pub use prc::{expected_prc, prc};
pub use rademacher::rademacher;
pub use trc::trc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Conditional Rademacher complexity.
    Rademacher,
    /// Permutational Rademacher complexity.
    Prc,
    /// Expected permutational complexity over random train sets.
    ExpectedPrc,
    /// Transductive Rademacher complexity.
    Trc,
    /// Maximal discrepancy averaged over balanced orderings.
    MaxDiscrepancy,
    /// Expected supremum of test mean minus train mean.
    EmpiricalProcessSup,
}

/// A complexity value together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub quantity: Quantity,
    pub value: f64,
    /// Zero in exact mode.
    pub std_error: f64,
    pub method: Mode,
    /// Monte Carlo draws, or the number of enumerated outcomes.
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub abs_variant: bool,
    pub params: BTreeMap<String, f64>,
}

impl ComplexityEstimate {
    fn exact(quantity: Quantity, value: f64, outcomes: u128, config: &EstimationConfig, abs: bool) -> Self {
        Self {
            quantity,
            value,
            std_error: 0.0,
            method: Mode::Exact,
            samples: outcomes as u64,
            seed: config.seed,
            workers: config.workers,
            abs_variant: abs,
            params: BTreeMap::new(),
        }
    }

    fn monte_carlo(quantity: Quantity, mc: McSummary, scale: f64, config: &EstimationConfig, abs: bool) -> Self {
        Self {
            quantity,
            value: mc.mean * scale,
            std_error: mc.std_error * scale,
            method: Mode::MonteCarlo,
            samples: mc.samples,
            seed: config.seed,
            workers: config.workers,
            abs_variant: abs,
            params: BTreeMap::new(),
        }
    }

    fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_owned(), value);
        self
    }
}

/// The class values at a list of points, gathered row-major.
#[derive(Debug, Clone)]
pub(crate) struct Gathered {
    data: Vec<f64>,
    width: usize,
}

impl Gathered {
    pub(crate) fn new(class: &FunctionClass, points: &[usize]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("the point list is empty".into()));
        }
        if let Some(&bad) = points.iter().find(|&&p| p >= class.num_points()) {
            return Err(Error::InvalidArgument(format!(
                "point {bad} out of range for a class over {} points",
                class.num_points()
            )));
        }
        let data = class
            .rows()
            .flat_map(|r| points.iter().map(move |&p| r[p]))
            .collect();
        Ok(Self {
            data,
            width: points.len(),
        })
    }

    pub(crate) fn width(&self) -> usize {
        self.width
    }

    pub(crate) fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.width)
    }

    /// `max_f sum_i coef[i] f(x_i)`, or of its absolute value.
    pub(crate) fn sup(&self, coef: &[f64], abs: bool) -> f64 {
        debug_assert_eq!(coef.len(), self.width);
        let mut best = f64::NEG_INFINITY;
        for row in self.rows() {
            let s: f64 = row.iter().zip(coef).map(|(a, b)| a * b).sum();
            best = best.max(if abs { s.abs() } else { s });
        }
        best
    }
}

/// Fills `out` with i.i.d. uniform ±1 values, 64 signs per generator call.
pub(crate) fn fill_signs<R: RngCore + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for chunk in out.chunks_mut(64) {
        let mut bits = rng.next_u64();
        for x in chunk {
            *x = if bits & 1 == 0 { 1.0 } else { -1.0 };
            bits >>= 1;
        }
    }
}

pub(crate) fn check_subset_split(m: usize, n: usize) -> Result<()> {
    if n == 0 || n >= m {
        return Err(Error::InvalidSize(format!(
            "split size n must satisfy 1 <= n <= m - 1, got n = {n}, m = {m}"
        )));
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::classes::FunctionClass;

    pub fn class(rows: &[&[f64]]) -> FunctionClass {
        FunctionClass::new(rows.iter().map(|r| r.to_vec()).collect(), None, "t").unwrap()
    }

    pub fn all(n: usize) -> Vec<usize> {
        (0..n).collect()
    }
}
