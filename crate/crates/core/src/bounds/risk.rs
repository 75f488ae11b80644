use serde::{Deserialize, Serialize};

use crate::classes::{loss_class, loss_class_on, LabeledProblem};
use crate::complexity::{expected_prc, prc, trc};
use crate::config::{EstimationConfig, Mode};
use crate::error::{Error, Result};
use crate::sampling::Partition;

use super::slack::{slack_term, trc_bound_constant, SlackScale};

/// Which risk bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RiskVariant {
    /// Transductive Rademacher complexity at `p = 1/4` plus `11 sqrt(2/N)`.
    #[serde(rename = "trc_eq9")]
    Eq9,
    /// Permutational complexity averaged over fresh train sets.
    #[serde(rename = "prc_expected_eq10")]
    Eq10,
    /// Permutational complexity on the observed train set.
    #[serde(rename = "prc_empirical_eq11")]
    Eq11,
}

impl RiskVariant {
    pub fn slack_scale(self) -> SlackScale {
        match self {
            Self::Eq9 | Self::Eq10 => SlackScale::One,
            Self::Eq11 => SlackScale::Two,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskParams {
    #[serde(rename = "N")]
    pub population: usize,
    pub m: usize,
    pub u: usize,
    /// Size of the negated block of the permutational split; absent for the
    /// TRC variant.
    pub n: Option<usize>,
    /// TRC sign parameter; present only for the TRC variant.
    pub p: Option<f64>,
    pub seed: u64,
    pub samples: u64,
    pub workers: usize,
}

/// One evaluated risk bound for a single hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskBoundReport {
    pub variant: RiskVariant,
    pub hypothesis: usize,
    pub train_risk: f64,
    pub complexity_term: f64,
    pub complexity_std_error: f64,
    pub complexity_method: Mode,
    pub slack_term: f64,
    pub total_bound: f64,
    pub delta: f64,
    /// `(11 sqrt(2/N) + slack) / slack` for the one-event slack at this delta:
    /// how much larger the TRC bound's deviation terms are.
    pub trc_slack_ratio: f64,
    pub params: RiskParams,
}

/// Ratio of the TRC bound's `11 sqrt(2/N) + slack` to the plain slack term.
pub fn trc_slack_ratio(population: usize, delta: f64) -> Result<f64> {
    let s = slack_term(population, delta, SlackScale::One)?;
    Ok((trc_bound_constant(population) + s) / s)
}

/// Mean loss of hypothesis `h` over the train points. Only train labels are read.
pub fn train_risk(problem: &LabeledProblem, partition: &Partition, h: usize) -> Result<f64> {
    check_problem(problem, partition)?;
    check_hypothesis(problem, h)?;
    let mut total = 0.0;
    for &i in partition.train() {
        total += problem.loss_at(h, i)?;
    }
    Ok(total / partition.m() as f64)
}

/// Hypothesis with the smallest train risk (lowest index on ties).
pub fn erm_hypothesis(problem: &LabeledProblem, partition: &Partition) -> Result<usize> {
    let mut best = (0, f64::INFINITY);
    for h in 0..problem.num_hypotheses() {
        let r = train_risk(problem, partition, h)?;
        if r < best.1 {
            best = (h, r);
        }
    }
    Ok(best.0)
}

fn check_problem(problem: &LabeledProblem, partition: &Partition) -> Result<()> {
    if partition.population() != problem.num_points() {
        return Err(Error::InvalidSize(format!(
            "partition covers {} points but the problem has {}",
            partition.population(),
            problem.num_points()
        )));
    }
    Ok(())
}

fn check_hypothesis(problem: &LabeledProblem, h: usize) -> Result<()> {
    if h >= problem.num_hypotheses() {
        return Err(Error::InvalidArgument(format!(
            "hypothesis {h} out of range for {} hypotheses",
            problem.num_hypotheses()
        )));
    }
    Ok(())
}

/// Evaluates the chosen risk bound for hypothesis `h` on `partition`.
///
/// Requires `m = u`. `n` is the negated block size of the permutational
/// split and is ignored by the TRC variant. The eq. 11 path reads only the
/// train labels; the eq. 10 expectation averages over fresh partitions and
/// therefore uses the whole labeled population.
pub fn risk_bound(
    problem: &LabeledProblem,
    partition: &Partition,
    h: usize,
    variant: RiskVariant,
    n: usize,
    delta: f64,
    config: &EstimationConfig,
) -> Result<RiskBoundReport> {
    check_problem(problem, partition)?;
    check_hypothesis(problem, h)?;
    let (m, u, big_n) = (partition.m(), partition.u(), partition.population());
    if m != u {
        return Err(Error::InvalidSize(format!("risk bounds need m = u, got m = {m}, u = {u}")));
    }
    let slack = slack_term(big_n, delta, variant.slack_scale())?;
    let train = train_risk(problem, partition, h)?;
    let (est, extra, n_param, p_param) = match variant {
        RiskVariant::Eq11 => {
            let local = loss_class_on(problem, partition.train())?;
            let pts: Vec<usize> = (0..m).collect();
            (prc(&local, &pts, n, config, false)?, 0.0, Some(n), None)
        }
        RiskVariant::Eq10 => {
            let all: Vec<usize> = (0..big_n).collect();
            let est = expected_prc(&loss_class(problem)?, &all, m, n, config, false)?;
            (est, 0.0, Some(n), None)
        }
        RiskVariant::Eq9 => {
            let all: Vec<usize> = (0..big_n).collect();
            let est = trc(&loss_class(problem)?, &all, m, u, 0.25, config)?;
            (est, trc_bound_constant(big_n), None, Some(0.25))
        }
    };
    let complexity = est.value + extra;
    Ok(RiskBoundReport {
        variant,
        hypothesis: h,
        train_risk: train,
        complexity_term: complexity,
        complexity_std_error: est.std_error,
        complexity_method: est.method,
        slack_term: slack,
        total_bound: train + complexity + slack,
        delta,
        trc_slack_ratio: trc_slack_ratio(big_n, delta)?,
        params: RiskParams {
            population: big_n,
            m,
            u,
            n: n_param,
            p: p_param,
            seed: config.seed,
            samples: est.samples,
            workers: config.workers,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{random_zero_one_problem, LossSpec};
    use crate::config::rng_from_seed;
    use crate::sampling::sample_partition;

    fn small_problem(seed: u64) -> (LabeledProblem, Partition) {
        let mut rng = rng_from_seed(seed);
        let p = random_zero_one_problem(4, 8, &mut rng).unwrap();
        let part = sample_partition(8, 4, &mut rng).unwrap();
        (p, part)
    }

    #[test]
    fn total_is_sum_of_terms() {
        let (p, part) = small_problem(1);
        for v in [RiskVariant::Eq9, RiskVariant::Eq10, RiskVariant::Eq11] {
            let r = risk_bound(&p, &part, 0, v, 2, 0.1, &EstimationConfig::exact()).unwrap();
            assert_eq!(r.total_bound, r.train_risk + r.complexity_term + r.slack_term);
            assert!((0.0..=1.0).contains(&r.train_risk));
        }
    }

    #[test]
    fn perfect_hypothesis_has_zero_train_risk() {
        let labels = vec![1, -1, 1, -1, 1, 1];
        let p = LabeledProblem::new(vec![labels.clone(), vec![1; 6]], labels, LossSpec::ZeroOne).unwrap();
        let part = Partition::from_train(6, &[0, 2, 4]).unwrap();
        let r = risk_bound(&p, &part, 0, RiskVariant::Eq11, 1, 0.2, &EstimationConfig::exact()).unwrap();
        assert_eq!(r.train_risk, 0.0);
        assert_eq!(r.total_bound, r.complexity_term + r.slack_term);
    }

    #[test]
    fn singleton_class_has_zero_prc_term() {
        let p = LabeledProblem::new(vec![vec![1, 1, -1, -1]], vec![1, -1, 1, -1], LossSpec::ZeroOne).unwrap();
        let part = Partition::from_train(4, &[0, 3]).unwrap();
        for v in [RiskVariant::Eq10, RiskVariant::Eq11] {
            let r = risk_bound(&p, &part, 0, v, 1, 0.1, &EstimationConfig::exact()).unwrap();
            assert!(r.complexity_term.abs() < 1e-12);
            assert!((r.total_bound - r.train_risk - r.slack_term).abs() < 1e-12);
        }
    }

    #[test]
    fn eq11_ignores_test_labels() {
        let (p, part) = small_problem(4);
        let flipped: Vec<i64> = part.test().iter().map(|&i| -p.labels()[i]).collect();
        let poisoned = p.with_labels_at(part.test(), &flipped).unwrap();
        let cfg = EstimationConfig::exact();
        for h in 0..p.num_hypotheses() {
            let a = risk_bound(&p, &part, h, RiskVariant::Eq11, 2, 0.05, &cfg).unwrap();
            let b = risk_bound(&poisoned, &part, h, RiskVariant::Eq11, 2, 0.05, &cfg).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn monotone_in_delta() {
        let (p, part) = small_problem(7);
        for v in [RiskVariant::Eq9, RiskVariant::Eq10, RiskVariant::Eq11] {
            let totals: Vec<f64> = [0.01, 0.1, 0.5, 0.9]
                .iter()
                .map(|&d| risk_bound(&p, &part, 1, v, 2, d, &EstimationConfig::exact()).unwrap().total_bound)
                .collect();
            assert!(totals.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn trc_variant_folds_in_constant() {
        let (p, part) = small_problem(2);
        let r = risk_bound(&p, &part, 0, RiskVariant::Eq9, 2, 0.1, &EstimationConfig::exact()).unwrap();
        let all: Vec<usize> = (0..8).collect();
        let t = trc(&loss_class(&p).unwrap(), &all, 4, 4, 0.25, &EstimationConfig::exact()).unwrap();
        assert!((r.complexity_term - t.value - 11.0 * 0.5).abs() < 1e-12);
        assert_eq!(r.params.p, Some(0.25));
        assert_eq!(r.params.n, None);
    }

    #[test]
    fn slack_ratio_for_large_populations() {
        // (11 sqrt(2/N) + s) / s with s ~ sqrt(2 ln(1/delta) / N) tends to
        // 1 + 11 / sqrt(ln 100) at delta = 0.01.
        let limit = 1.0 + 11.0 / 100f64.ln().sqrt();
        let r = trc_slack_ratio(1_000_000, 0.01).unwrap();
        assert!((r - limit).abs() < 1e-3);
    }

    #[test]
    fn rejects_unequal_split() {
        let (p, _) = small_problem(3);
        let part = Partition::from_train(8, &[0, 1, 2]).unwrap();
        let err = risk_bound(&p, &part, 0, RiskVariant::Eq11, 1, 0.1, &EstimationConfig::exact());
        assert!(matches!(err, Err(Error::InvalidSize(_))));
    }

    #[test]
    fn erm_picks_lowest_train_risk() {
        let labels = vec![1, 1, 1, 1];
        let p = LabeledProblem::new(vec![vec![-1, -1, 1, 1], vec![1, 1, -1, -1]], labels, LossSpec::ZeroOne).unwrap();
        let part = Partition::from_train(4, &[0, 1]).unwrap();
        assert_eq!(erm_hypothesis(&p, &part).unwrap(), 1);
    }
}
