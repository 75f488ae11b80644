//! Finite function classes stored as value matrices.
//!
//! A class is known only through its values on the fixed point set, so a
//! supremum over the class is a maximum over matrix rows.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::enumerate::{for_each_subset, Space};
use crate::error::{Error, Result};
use crate::sampling::Partition;

/// One row per function, one column per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionClass {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
    bound: f64,
    bound_declared: bool,
    name: String,
}

impl FunctionClass {
    /// Builds a class from its rows. `bound = None` infers `B` as the largest
    /// absolute entry.
    pub fn new(rows: Vec<Vec<f64>>, bound: Option<f64>, name: impl Into<String>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::InvalidArgument(format!(
                "row {i} has {} values, expected {cols}",
                r.len()
            )));
        }
        let n_rows = rows.len();
        Self::from_flat(rows.concat(), n_rows, cols, bound, name)
    }

    pub fn from_flat(
        values: Vec<f64>,
        rows: usize,
        cols: usize,
        bound: Option<f64>,
        name: impl Into<String>,
    ) -> Result<Self> {
        if rows == 0 {
            return Err(Error::InvalidArgument("a function class needs at least one function".into()));
        }
        if cols == 0 {
            return Err(Error::InvalidArgument("a function class needs at least one point".into()));
        }
        if values.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "expected {rows} x {cols} = {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value {bad}")));
        }
        let max_abs = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let (bound, bound_declared) = match bound {
            Some(b) if !(b.is_finite() && b >= 0.0) => {
                return Err(Error::InvalidArgument(format!("declared bound {b} is not a nonnegative real")))
            }
            Some(b) if max_abs > b => {
                return Err(Error::InvalidArgument(format!(
                    "entry of magnitude {max_abs} exceeds the declared bound {b}"
                )))
            }
            Some(b) => (b, true),
            None => (max_abs, false),
        };
        Ok(Self {
            values,
            rows,
            cols,
            bound,
            bound_declared,
            name: name.into(),
        })
    }

    pub fn num_functions(&self) -> usize {
        self.rows
    }

    pub fn num_points(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, row: usize, point: usize) -> f64 {
        self.values[row * self.cols + point]
    }

    /// Uniform bound `B` with `|f(z)| <= B` for every entry.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn bound_declared(&self) -> bool {
        self.bound_declared
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Multiplies every value (and the bound) by `c >= 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidArgument(format!("scale {c} must be a nonnegative real")));
        }
        let values = self.values.iter().map(|v| v * c).collect();
        let bound = self.bound_declared.then_some(self.bound * c);
        Self::from_flat(values, self.rows, self.cols, bound, format!("{}*{c}", self.name))
    }

    /// The class with `extra` rows appended.
    pub fn with_rows(&self, extra: &FunctionClass) -> Result<Self> {
        if extra.cols != self.cols {
            return Err(Error::InvalidArgument(format!(
                "cannot append rows over {} points to a class over {} points",
                extra.cols, self.cols
            )));
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&extra.values);
        let bound = self.bound_declared.then_some(self.bound.max(extra.bound));
        Self::from_flat(values, self.rows + extra.rows, self.cols, bound, self.name.clone())
    }

    /// The class seen only through the given points, in the given order.
    pub fn restrict(&self, points: &[usize]) -> Result<Self> {
        if let Some(&bad) = points.iter().find(|&&p| p >= self.cols) {
            return Err(Error::InvalidArgument(format!(
                "point {bad} out of range for {} points",
                self.cols
            )));
        }
        let values = self
            .rows()
            .flat_map(|r| points.iter().map(move |&p| r[p]))
            .collect();
        let bound = self.bound_declared.then_some(self.bound);
        Self::from_flat(values, self.rows, points.len(), bound, self.name.clone())
    }

    /// Re-checks the construction invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let b = self.bound_declared.then_some(self.bound);
        Self::from_flat(self.values.clone(), self.rows, self.cols, b, "").map(|_| ())
    }
}

/// The two achievability classes on `m` points: `F'` holds the constant
/// functions 1 and 0; `F''` holds every 0/1 vector with exactly `m/2` ones.
pub fn lemma3_classes(m: usize, cap: u64) -> Result<(FunctionClass, FunctionClass)> {
    if m < 2 || m % 2 != 0 {
        return Err(Error::Parity(format!("achievability classes need even m >= 2, got {m}")));
    }
    Space::Subsets { n: m, k: m / 2 }.checked_count(cap)?;
    let constants = FunctionClass::new(vec![vec![1.0; m], vec![0.0; m]], Some(1.0), format!("F'_{m}"))?;
    let mut rows = Vec::new();
    for_each_subset(m, m / 2, |ones| {
        let mut r = vec![0.0; m];
        for &i in ones {
            r[i] = 1.0;
        }
        rows.push(r);
    });
    let half_ones = FunctionClass::new(rows, Some(1.0), format!("F''_{m}"))?;
    Ok((constants, half_ones))
}

/// `num_functions` rows of i.i.d. uniform values on `[-bound, bound]`.
pub fn random_class<R: Rng + ?Sized>(
    num_functions: usize,
    num_points: usize,
    bound: f64,
    rng: &mut R,
) -> Result<FunctionClass> {
    if num_functions == 0 || num_points < 2 {
        return Err(Error::InvalidSize(format!(
            "random class needs >= 1 function and >= 2 points, got {num_functions} x {num_points}"
        )));
    }
    if !(bound.is_finite() && bound >= 0.0) {
        return Err(Error::InvalidArgument(format!("bound {bound} must be a nonnegative real")));
    }
    let values = (0..num_functions * num_points)
        .map(|_| if bound > 0.0 { rng.gen_range(-bound..=bound) } else { 0.0 })
        .collect();
    FunctionClass::from_flat(values, num_functions, num_points, Some(bound), "random")
}

/// Bounded loss `l(prediction, label)` with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LossSpec {
    /// `(1 - y y') / 2` on labels in {-1, +1}.
    ZeroOne,
    /// Explicit `(prediction, label) -> loss` entries.
    Table(BTreeMap<(i64, i64), f64>),
}

impl LossSpec {
    pub fn table(entries: impl IntoIterator<Item = (i64, i64, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (prediction, label, loss) in entries {
            if !(0.0..=1.0).contains(&loss) {
                return Err(Error::InvalidArgument(format!(
                    "loss {loss} for ({prediction}, {label}) lies outside [0, 1]"
                )));
            }
            map.insert((prediction, label), loss);
        }
        Ok(LossSpec::Table(map))
    }

    pub fn eval(&self, prediction: i64, label: i64) -> Result<f64> {
        match self {
            LossSpec::ZeroOne => {
                if [prediction, label].iter().all(|v| *v == 1 || *v == -1) {
                    Ok(0.5 * (1.0 - (prediction * label) as f64))
                } else {
                    Err(Error::MissingLossEntry { prediction, label })
                }
            }
            LossSpec::Table(t) => t
                .get(&(prediction, label))
                .copied()
                .ok_or(Error::MissingLossEntry { prediction, label }),
        }
    }
}

/// Hypothesis outputs on all `N` points together with the labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledProblem {
    predictions: Vec<Vec<i64>>,
    labels: Vec<i64>,
    loss: LossSpec,
}

impl LabeledProblem {
    pub fn new(predictions: Vec<Vec<i64>>, labels: Vec<i64>, loss: LossSpec) -> Result<Self> {
        if predictions.is_empty() {
            return Err(Error::InvalidArgument("a problem needs at least one hypothesis".into()));
        }
        if labels.len() < 2 {
            return Err(Error::InvalidSize(format!("a problem needs >= 2 points, got {}", labels.len())));
        }
        for (h, row) in predictions.iter().enumerate() {
            if row.len() != labels.len() {
                return Err(Error::InvalidArgument(format!(
                    "hypothesis {h} has {} predictions but there are {} labels",
                    row.len(),
                    labels.len()
                )));
            }
            for (p, y) in row.iter().zip(&labels) {
                loss.eval(*p, *y)?;
            }
        }
        Ok(Self { predictions, labels, loss })
    }

    pub fn num_hypotheses(&self) -> usize {
        self.predictions.len()
    }

    pub fn num_points(&self) -> usize {
        self.labels.len()
    }

    pub fn predictions(&self) -> &[Vec<i64>] {
        &self.predictions
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn loss(&self) -> &LossSpec {
        &self.loss
    }

    /// Loss of hypothesis `h` at point `i`.
    pub fn loss_at(&self, h: usize, i: usize) -> Result<f64> {
        self.loss.eval(self.predictions[h][i], self.labels[i])
    }

    /// The same problem with the labels of `points` replaced.
    pub fn with_labels_at(&self, points: &[usize], labels: &[i64]) -> Result<Self> {
        let mut new = self.labels.clone();
        for (&i, &y) in points.iter().zip(labels) {
            new[i] = y;
        }
        Self::new(self.predictions.clone(), new, self.loss.clone())
    }
}

/// The loss class `{l_h : h in H}` over all points, with `B = 1`.
pub fn loss_class(problem: &LabeledProblem) -> Result<FunctionClass> {
    let all: Vec<usize> = (0..problem.num_points()).collect();
    loss_class_on(problem, &all)
}

/// The loss class seen only through `points`; labels elsewhere are never read.
pub fn loss_class_on(problem: &LabeledProblem, points: &[usize]) -> Result<FunctionClass> {
    let mut values = Vec::with_capacity(problem.num_hypotheses() * points.len());
    for h in 0..problem.num_hypotheses() {
        for &i in points {
            values.push(problem.loss_at(h, i)?);
        }
    }
    FunctionClass::from_flat(values, problem.num_hypotheses(), points.len(), Some(1.0), "loss")
}

/// Loss class restricted to the train side of `partition`.
pub fn train_loss_class(problem: &LabeledProblem, partition: &Partition) -> Result<FunctionClass> {
    loss_class_on(problem, partition.train())
}

/// Random ±1 predictions and labels under zero-one loss.
pub fn random_zero_one_problem<R: Rng + ?Sized>(
    hypotheses: usize,
    num_points: usize,
    rng: &mut R,
) -> Result<LabeledProblem> {
    let sign = |rng: &mut R| if rng.gen::<bool>() { 1 } else { -1 };
    let labels: Vec<i64> = (0..num_points).map(|_| sign(rng)).collect();
    let predictions = (0..hypotheses)
        .map(|_| (0..num_points).map(|_| sign(rng)).collect())
        .collect();
    LabeledProblem::new(predictions, labels, LossSpec::ZeroOne)
}
