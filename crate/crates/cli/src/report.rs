//! JSON reports. Exact values are strings in rational text form.

use std::collections::BTreeMap;

use bethe_core::verdict::{Verdict, Witness};
use bethe_core::Error;
use serde::{Deserialize, Serialize};

use crate::problem::ParseFailure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub context: String,
    pub lhs: String,
    pub rhs: String,
}

impl From<Witness> for WitnessEntry {
    fn from(w: Witness) -> Self {
        Self { context: w.context, lhs: w.lhs, rhs: w.rhs }
    }
}

/// Aggregate of one check over all trials of one cardinality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    pub trials: usize,
    pub passed: bool,
    pub comparisons: usize,
    pub failures: usize,
    /// First failing comparison.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessEntry>,
    /// Index of the first failing trial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_trial: Option<usize>,
    /// Exact values for single explicit inputs and for the first failing
    /// trial; a failing trial also carries its input as `problem`, a
    /// problem file that reproduces it.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term_counts: Option<TermCounts>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCounts {
    pub outer: u64,
    pub inner: u64,
    pub expected_outer: u64,
    pub expected_inner: u64,
}

/// A domain or input error, reported instead of aborting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEntry {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub admissible_pivots: Option<Vec<usize>>,
}

impl ErrorEntry {
    pub fn from_error(e: &Error, context: impl Into<String>) -> Self {
        let kind = match e {
            Error::DivisionByZero => "DivisionByZero",
            Error::PoleAtZero => "PoleAtZero",
            Error::PrecisionExhausted => "PrecisionExhausted",
            Error::DuplicatePoints => "DuplicatePoints",
            Error::NonSquare { .. } => "NonSquare",
            Error::Pole { .. } => "PoleError",
            Error::MissingRValue { .. } => "MissingRValue",
            Error::BadCardinality { .. } => "BadCardinality",
            Error::CardinalityMismatch(_) => "CardinalityMismatch",
            Error::ConstraintViolation(_) => "ConstraintViolation",
            Error::ZeroPivot { .. } => "ZeroPivot",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Parse(_) => "ParseError",
        };
        let admissible_pivots = match e {
            Error::ZeroPivot { admissible, .. } => Some(admissible.clone()),
            _ => None,
        };
        Self {
            kind: kind.into(),
            message: e.to_string(),
            context: Some(context.into()),
            line: None,
            field: None,
            admissible_pivots,
        }
    }

    pub fn parse(f: &ParseFailure) -> Self {
        Self {
            kind: "ParseError".into(),
            message: f.to_string(),
            context: None,
            line: f.line,
            field: f.field.clone(),
            admissible_pivots: None,
        }
    }

    pub fn other(kind: &str, message: String) -> Self {
        Self { kind: kind.into(), message, context: None, line: None, field: None, admissible_pivots: None }
    }
}

/// One size of the sum-versus-determinant benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchEntry {
    pub a: usize,
    pub b: usize,
    /// "complete" or "timeout".
    pub sum_status: String,
    pub sum_secs: f64,
    pub det_secs: f64,
    pub det_dimension: usize,
    pub term_counts: TermCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum_value: Option<String>,
    pub det_value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub version: u32,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckEntry>,
    pub errors: Vec<ErrorEntry>,
    /// Collision re-draws and other notes, in trial order.
    pub log: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub bench: Vec<BenchEntry>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.into(),
            version: crate::problem::VERSION,
            seed,
            passed: true,
            checks: Vec::new(),
            errors: Vec::new(),
            log: Vec::new(),
            bench: Vec::new(),
        }
    }

    pub fn finish(mut self) -> Self {
        self.passed = self.errors.is_empty() && self.checks.iter().all(|c| c.passed);
        self
    }

    /// Checks named `name`.
    pub fn checks_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a CheckEntry> + 'a {
        self.checks.iter().filter(move |c| c.name == name)
    }
}

/// Folds per-trial verdicts into one [`CheckEntry`].
#[derive(Debug, Clone)]
pub struct Tally {
    entry: CheckEntry,
}

impl Tally {
    pub fn new(name: &str, size: Option<(usize, usize)>) -> Self {
        Self {
            entry: CheckEntry {
                name: name.into(),
                a: size.map(|s| s.0),
                b: size.map(|s| s.1),
                trials: 0,
                passed: true,
                comparisons: 0,
                failures: 0,
                witness: None,
                failing_trial: None,
                values: BTreeMap::new(),
                term_counts: None,
            },
        }
    }

    /// Adds one trial; `values` are kept for the first failure, or always if
    /// `keep_values`.
    pub fn add(&mut self, v: &Verdict, trial: Option<usize>, values: &BTreeMap<String, String>, keep_values: bool) {
        let e = &mut self.entry;
        e.trials += 1;
        e.comparisons += v.comparisons;
        e.failures += v.failures;
        if !v.passed() && e.witness.is_none() {
            e.witness = v.witness.clone().map(Into::into);
            e.failing_trial = trial;
            e.values = values.clone();
        } else if keep_values && e.passed {
            e.values = values.clone();
        }
        e.passed = e.failures == 0;
    }

    pub fn set_counts(&mut self, counts: TermCounts) {
        self.entry.term_counts = Some(counts);
    }

    pub fn finish(self) -> CheckEntry {
        self.entry
    }
}
