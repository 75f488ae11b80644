//! The versioned JSON document every subcommand prints.

use prc_core::bounds::{CoverageReport, ProbeReport, RiskBoundReport, VerificationReport};
use prc_core::complexity::ComplexityEstimate;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub report: Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Report {
    Complexity(ComplexityEstimate),
    Bound(RiskBoundReport),
    Verification(VerificationReport),
    Coupling(CouplingReport),
    Coverage(CoverageOutput),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "emit")]
pub enum CouplingReport {
    Distribution {
        m: usize,
        outcomes: Vec<CouplingOutcome>,
    },
    Samples {
        m: usize,
        seed: u64,
        draws: Vec<CoupledPair>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingOutcome {
    pub vector: Vec<i8>,
    /// Exact probability as `numerator/denominator`.
    pub probability: String,
    pub probability_f64: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledPair {
    pub rademacher: Vec<i8>,
    pub balanced: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageOutput {
    pub coverage: CoverageReport,
    pub probe: Option<ProbeReport>,
}

impl ReportDocument {
    pub fn new(report: Report) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_owned(),
            report,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
