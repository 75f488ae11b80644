//! Input files: a numeric CSV matrix (one row per function) or a JSON
//! labeled problem.

use std::collections::BTreeMap;
use std::path::Path;

use prc_core::classes::{loss_class, FunctionClass, LabeledProblem, LossSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A parsed input file.
#[derive(Debug, Clone, PartialEq)]
pub enum InputDocument {
    Matrix(FunctionClass),
    Problem(ProblemInput),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInput {
    pub problem: LabeledProblem,
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LossField {
    Named(String),
    Table { table: Vec<TableEntry> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub prediction: i64,
    pub label: i64,
    pub loss: f64,
}

/// On-disk shape of a labeled problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub points: usize,
    pub predictions: Vec<Vec<i64>>,
    pub labels: Vec<i64>,
    pub loss: LossField,
    #[serde(default)]
    pub bound: Option<f64>,
}

impl InputDocument {
    /// The class the complexity measures run on: the matrix itself, or the
    /// loss class of a problem.
    pub fn into_class(self) -> Result<FunctionClass, CliError> {
        match self {
            Self::Matrix(c) => Ok(c),
            Self::Problem(p) => {
                let c = loss_class(&p.problem)?;
                match p.bound {
                    Some(b) => Ok(FunctionClass::new(c.rows().map(<[f64]>::to_vec).collect(), Some(b), "loss")?),
                    None => Ok(c),
                }
            }
        }
    }

    pub fn into_problem(self) -> Result<ProblemInput, CliError> {
        match self {
            Self::Problem(p) => Ok(p),
            Self::Matrix(_) => Err(CliError::Input("this command needs a JSON labeled problem, not a CSV matrix".into())),
        }
    }
}

/// Reads `path`, treating it as JSON when its first non-blank character is `{`.
pub fn parse_input(path: &Path) -> Result<InputDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
    if text.trim_start().starts_with('{') {
        parse_problem(&text).map(InputDocument::Problem)
    } else {
        parse_matrix(&text, name).map(InputDocument::Matrix)
    }
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses a CSV matrix. A first row with any non-numeric cell is a header.
/// The bound is inferred as the largest absolute entry.
pub fn parse_matrix(text: &str, name: &str) -> Result<FunctionClass, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("csv: {e}")))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if let Some(w) = width {
            if record.len() != w {
                return Err(CliError::Input(format!(
                    "csv row {} has {} cells, expected {w}",
                    line + 1,
                    record.len()
                )));
            }
        }
        let parsed: Option<Vec<f64>> = record.iter().map(parse_cell).collect();
        match parsed {
            Some(r) => rows.push(r),
            None if line == 0 => {}
            None => {
                let bad = record.iter().find(|c| parse_cell(c).is_none()).unwrap_or_default();
                return Err(CliError::Input(format!("csv row {}: '{bad}' is not a finite number", line + 1)));
            }
        }
        width = Some(record.len());
    }
    if rows.is_empty() {
        return Err(CliError::Input("csv holds no numeric rows".into()));
    }
    Ok(FunctionClass::new(rows, None, name)?)
}

pub fn parse_problem(text: &str) -> Result<ProblemInput, CliError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("json: {e}")))?;
    if file.labels.len() != file.points {
        return Err(CliError::Input(format!(
            "json: {} labels for {} points",
            file.labels.len(),
            file.points
        )));
    }
    let loss = match file.loss {
        LossField::Named(n) if n == "zero_one" => LossSpec::ZeroOne,
        LossField::Named(n) => return Err(CliError::Input(format!("json: unknown loss '{n}'"))),
        LossField::Table { table } => {
            let mut seen = BTreeMap::new();
            for t in &table {
                if seen.insert((t.prediction, t.label), t.loss).is_some() {
                    return Err(CliError::Input(format!(
                        "json: duplicate loss entry for prediction {} and label {}",
                        t.prediction, t.label
                    )));
                }
            }
            LossSpec::table(table.iter().map(|t| (t.prediction, t.label, t.loss)))?
        }
    };
    if let Some(b) = file.bound {
        if !(b.is_finite() && b >= 0.0) {
            return Err(CliError::Input(format!("json: bound {b} must be a nonnegative number")));
        }
    }
    let problem = LabeledProblem::new(file.predictions, file.labels, loss)?;
    Ok(ProblemInput { problem, bound: file.bound })
}
