//! Risk bounds, the earlier comparison bounds, coverage simulation and the
//! inequality verification harness.

mod coverage;
mod prior;
mod risk;
mod slack;
mod verify;

pub use coverage::{bounded_difference_probe, coverage_check, CoverageReport, ProbeReport, MIN_COVERAGE_TRIALS};
pub use prior::{prior_bounds, PriorBounds, C0};
pub use risk::{erm_hypothesis, risk_bound, train_risk, trc_slack_ratio, RiskBoundReport, RiskParams, RiskVariant};
pub use slack::{slack_term, trc_bound_constant, SlackScale};
pub use verify::{
    parse_checks, random_instance, verify_theorems, CheckId, CheckRecord, InstanceSource, SkippedCheck,
    VerificationReport, VerificationSummary,
};
