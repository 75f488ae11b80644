//! Library side of the `prc-lab` command: argument parsing, input files,
//! report documents and dispatch.

pub mod error;
pub mod input;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prc_core::bounds::{
    bounded_difference_probe, coverage_check, erm_hypothesis, parse_checks, risk_bound, verify_theorems,
    InstanceSource, RiskVariant,
};
use prc_core::complexity::{empirical_process_sup, expected_discrepancy, prc, rademacher, trc};
use prc_core::config::{rng_from_seed, EstimationConfig, DEFAULT_ENUMERATION_CAP};
use prc_core::coupling::{couple, coupling_distribution};
use prc_core::sampling::{sample_partition, Partition};
use prc_core::signs::SignVector;
use rand::Rng;

use error::CliError;
use input::parse_input;
use report::{CoupledPair, CouplingOutcome, CouplingReport, CoverageOutput, Report, ReportDocument};

/// Environment variable read when `--seed` is not given.
pub const SEED_ENV: &str = "PRC_LAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "prc-lab", version, about = "Transductive complexity measures and risk bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one complexity measure on a class.
    Complexity(ComplexityArgs),
    /// Evaluate a risk bound on a labeled problem.
    Bound(BoundArgs),
    /// Check the comparison inequalities on generated or given classes.
    Verify(VerifyArgs),
    /// Inspect the coupling between Rademacher and balanced sign vectors.
    Couple(CoupleArgs),
    /// Estimate how often the train-set bound fails over random partitions.
    Coverage(CoverageArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Prc,
    Rademacher,
    Trc,
    Discrepancy,
    Esup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Exact when the enumeration fits under the cap, Monte Carlo otherwise.
    Auto,
    Exact,
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct EstimationArgs {
    #[arg(long, value_enum, default_value = "auto")]
    pub mode: ModeArg,
    /// Monte Carlo draws.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Master seed; falls back to PRC_LAB_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Largest number of outcomes exact mode may enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    #[arg(long, value_enum)]
    pub measure: Measure,
    #[arg(long)]
    pub input: PathBuf,
    /// Train size for trc and esup (default N/2).
    #[arg(long)]
    pub m: Option<usize>,
    /// Negated block size for prc (default N/2).
    #[arg(long)]
    pub n: Option<usize>,
    /// Sign probability for trc (default m u / N^2).
    #[arg(long)]
    pub p: Option<f64>,
    /// Take absolute values inside the supremum.
    #[arg(long)]
    pub abs: bool,
    #[command(flatten)]
    pub est: EstimationArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Eq9,
    Eq10,
    Eq11,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub variant: VariantArg,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub delta: f64,
    /// Negated block size of the permutational split (default m/2).
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated train indices; a seeded uniform half split otherwise.
    #[arg(long, value_delimiter = ',')]
    pub train: Option<Vec<usize>>,
    /// Hypothesis index; the train-risk minimizer otherwise.
    #[arg(long)]
    pub hypothesis: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassSource {
    Random,
    Lemma3,
    Input,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `all`, a group (t1, t2, t3, l2, l3, c1, appendix), or a comma list of
    /// groups and check ids.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, value_enum, default_value = "random")]
    pub classes: ClassSource,
    /// Instances to generate (default 200 random or 6 achievability pairs).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Distribution,
    Samples,
}

#[derive(Debug, Args)]
pub struct CoupleArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "distribution")]
    pub emit: Emit,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of coupled pairs for `--emit samples`.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Negated block size of the permutational split (default m/2).
    #[arg(long)]
    pub n: Option<usize>,
    /// How each trial's permutational complexity is computed.
    #[arg(long, value_enum, default_value = "mc")]
    pub mode: ModeArg,
    /// Monte Carlo splits per trial.
    #[arg(long, default_value_t = 200)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
    /// Also run this many single-swap bounded-difference probes.
    #[arg(long, default_value_t = 0)]
    pub probe_swaps: u64,
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn config(exact: bool, samples: u64, seed: u64, workers: usize, cap: u64) -> EstimationConfig {
    let base = if exact {
        EstimationConfig::exact().with_seed(seed)
    } else {
        EstimationConfig::monte_carlo(samples, seed)
    };
    base.with_workers(workers).with_cap(cap)
}

/// Runs `f` under the requested mode; `auto` tries exact enumeration and
/// falls back to Monte Carlo when the enumeration cap is exceeded.
fn with_mode<T>(
    mode: ModeArg,
    samples: u64,
    seed: u64,
    workers: usize,
    cap: u64,
    f: impl Fn(&EstimationConfig) -> prc_core::Result<T>,
) -> Result<T, CliError> {
    match mode {
        ModeArg::Exact => Ok(f(&config(true, samples, seed, workers, cap))?),
        ModeArg::Mc => Ok(f(&config(false, samples, seed, workers, cap))?),
        ModeArg::Auto => match f(&config(true, samples, seed, workers, cap)) {
            Err(prc_core::Error::CapExceeded { .. }) => Ok(f(&config(false, samples, seed, workers, cap))?),
            other => Ok(other?),
        },
    }
}

fn run_complexity(a: &ComplexityArgs) -> Result<Report, CliError> {
    let class = parse_input(&a.input)?.into_class()?;
    let big_n = class.num_points();
    let pts: Vec<usize> = (0..big_n).collect();
    let seed = resolve_seed(a.est.seed)?;
    let m = a.m.unwrap_or(big_n / 2);
    if a.abs && matches!(a.measure, Measure::Trc | Measure::Discrepancy) {
        return Err(CliError::Usage("--abs applies only to prc, rademacher and esup".into()));
    }
    let u = big_n.saturating_sub(m);
    if a.measure == Measure::Trc && (m == 0 || u == 0) {
        return Err(CliError::Usage(format!("--m must lie in 1..{big_n}, got {m}")));
    }
    let p = a.p.unwrap_or((m * u) as f64 / (big_n * big_n) as f64);
    let e = &a.est;
    let est = with_mode(e.mode, e.samples, seed, e.workers, e.cap, |cfg| match a.measure {
        Measure::Prc => prc(&class, &pts, a.n.unwrap_or(big_n / 2), cfg, a.abs),
        Measure::Rademacher => rademacher(&class, &pts, cfg, a.abs),
        Measure::Trc => trc(&class, &pts, m, u, p, cfg),
        Measure::Discrepancy => expected_discrepancy(&class, &pts, cfg),
        Measure::Esup => empirical_process_sup(&class, &pts, m, cfg, a.abs),
    })?;
    Ok(Report::Complexity(est))
}

fn run_bound(a: &BoundArgs) -> Result<Report, CliError> {
    let problem = parse_input(&a.input)?.into_problem()?.problem;
    let big_n = problem.num_points();
    let seed = resolve_seed(a.seed)?;
    let partition = match &a.train {
        Some(train) => Partition::from_train(big_n, train)?,
        None => {
            if big_n % 2 != 0 {
                return Err(CliError::Usage(format!("risk bounds need an even number of points, got {big_n}")));
            }
            sample_partition(big_n, big_n / 2, &mut rng_from_seed(seed))?
        }
    };
    let m = partition.m();
    let n = a.n.unwrap_or((m / 2).max(1));
    let variant = match a.variant {
        VariantArg::Eq9 => RiskVariant::Eq9,
        VariantArg::Eq10 => RiskVariant::Eq10,
        VariantArg::Eq11 => RiskVariant::Eq11,
    };
    let h = match a.hypothesis {
        Some(h) => h,
        None => erm_hypothesis(&problem, &partition)?,
    };
    let report = with_mode(a.mode, a.samples, seed, a.workers, a.cap, |cfg| {
        risk_bound(&problem, &partition, h, variant, n, a.delta, cfg)
    })?;
    Ok(Report::Bound(report))
}

fn run_verify(a: &VerifyArgs) -> Result<Report, CliError> {
    let checks = parse_checks(&a.suite)?;
    let seed = resolve_seed(a.seed)?;
    let source = match a.classes {
        ClassSource::Random => InstanceSource::Random {
            count: a.count.unwrap_or(200),
            seed,
        },
        ClassSource::Lemma3 => InstanceSource::Lemma3 {
            count: a.count.unwrap_or(6),
        },
        ClassSource::Input => {
            let path = a
                .input
                .as_ref()
                .ok_or_else(|| CliError::Usage("--classes input needs --input FILE".into()))?;
            InstanceSource::Explicit(vec![parse_input(path)?.into_class()?])
        }
    };
    let cfg = EstimationConfig::exact()
        .with_seed(seed)
        .with_workers(a.workers)
        .with_cap(a.cap);
    Ok(Report::Verification(verify_theorems(&source, &checks, &cfg)?))
}

fn run_couple(a: &CoupleArgs) -> Result<Report, CliError> {
    match a.emit {
        Emit::Distribution => {
            let d = coupling_distribution(a.m, a.cap)?;
            let probs = d.probabilities_f64();
            let outcomes = d
                .entries
                .into_iter()
                .zip(probs)
                .map(|((vector, p), probability_f64)| CouplingOutcome {
                    vector,
                    probability: p.to_string(),
                    probability_f64,
                })
                .collect();
            Ok(Report::Coupling(CouplingReport::Distribution { m: a.m, outcomes }))
        }
        Emit::Samples => {
            if a.m == 0 || a.m % 2 != 0 {
                return Err(CliError::Core(prc_core::Error::Parity(format!(
                    "coupling needs a positive even length, got {}",
                    a.m
                ))));
            }
            let seed = resolve_seed(a.seed)?;
            let mut rng = rng_from_seed(seed);
            let mut draws = Vec::with_capacity(a.count);
            for _ in 0..a.count {
                let v: Vec<i8> = (0..a.m).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
                let sv = SignVector::rademacher(v.clone())?;
                let e = couple(&sv, &mut rng)?;
                draws.push(CoupledPair {
                    rademacher: v,
                    balanced: e.into_entries(),
                });
            }
            Ok(Report::Coupling(CouplingReport::Samples { m: a.m, seed, draws }))
        }
    }
}

fn run_coverage(a: &CoverageArgs) -> Result<Report, CliError> {
    let problem = parse_input(&a.input)?.into_problem()?.problem;
    let seed = resolve_seed(a.seed)?;
    let m = problem.num_points() / 2;
    let n = a.n.unwrap_or((m / 2).max(1));
    let coverage = with_mode(a.mode, a.samples, seed, a.workers, a.cap, |cfg| {
        coverage_check(&problem, a.delta, a.trials, n, cfg)
    })?;
    let probe = if a.probe_swaps > 0 {
        Some(bounded_difference_probe(&problem, a.probe_swaps, seed)?)
    } else {
        None
    };
    Ok(Report::Coverage(CoverageOutput { coverage, probe }))
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn failure(msg: &str) -> Outcome {
    Outcome {
        code: 1,
        stdout: String::new(),
        stderr: format!("error: {}\n", one_line(msg.trim_start_matches("error:"))),
    }
}

/// 2 for a verification report with normative failures, 0 otherwise.
pub fn exit_code(report: &Report) -> i32 {
    match report {
        Report::Verification(v) if v.summary.normative_failures > 0 => 2,
        _ => 0,
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
///
/// Exit codes: 0 on success, 1 on any usage or validation error (stdout is
/// then empty), 2 when a verification run records a normative failure.
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                };
            }
            let text = e.to_string();
            return failure(text.lines().next().unwrap_or("invalid arguments"));
        }
    };
    let result = match &cli.command {
        Command::Complexity(a) => run_complexity(a),
        Command::Bound(a) => run_bound(a),
        Command::Verify(a) => run_verify(a),
        Command::Couple(a) => run_couple(a),
        Command::Coverage(a) => run_coverage(a),
    };
    match result {
        Ok(report) => {
            Outcome {
                code: exit_code(&report),
                stdout: ReportDocument::new(report).to_json(),
                stderr: String::new(),
            }
        }
        Err(e) => failure(&e.to_string()),
    }
}
