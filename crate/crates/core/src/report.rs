//! Verification records shared by the acceptance suite and the CLI.

use serde::{Deserialize, Serialize};

/// One comparison `lhs ≈ rhs` with its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    /// Whether `tolerance` bounds `rel_err` rather than `abs_err`.
    pub relative: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    /// `|lhs − rhs| ≤ tolerance`.
    pub fn absolute(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::build(name.into(), lhs, rhs, tolerance, false)
    }

    /// `|lhs − rhs| ≤ tolerance · |rhs|`.
    pub fn relative(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::build(name.into(), lhs, rhs, tolerance, true)
    }

    /// `lhs ≥ rhs`; `tolerance` is unused and set to zero.
    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let mut c = Self::build(name.into(), lhs, rhs, 0.0, false);
        c.pass = lhs >= rhs;
        c
    }

    /// A predicate with no numeric comparison.
    pub fn flag(name: impl Into<String>, pass: bool, note: impl Into<String>) -> Self {
        let mut c = Self::build(name.into(), pass as u8 as f64, 1.0, 0.0, false);
        c.pass = pass;
        c.note = Some(note.into());
        c
    }

    fn build(name: String, lhs: f64, rhs: f64, tolerance: f64, relative: bool) -> Self {
        let abs_err = (lhs - rhs).abs();
        let rel_err = if rhs != 0.0 {
            abs_err / rhs.abs()
        } else {
            abs_err
        };
        let err = if relative { rel_err } else { abs_err };
        CheckRecord {
            name,
            lhs,
            rhs,
            abs_err,
            rel_err,
            tolerance,
            relative,
            pass: err <= tolerance,
            tail_bound: None,
            threshold: None,
            note: None,
        }
    }

    /// Attaches a truncation bound; the check also fails if the bound exceeds
    /// the tolerance.
    pub fn with_tail(mut self, tail: f64) -> Self {
        self.tail_bound = Some(tail);
        let scale = if self.relative { self.rhs.abs() } else { 1.0 };
        self.pass &= tail <= self.tolerance * scale;
        self
    }

    /// Attaches a tail estimate reported for information only.
    pub fn with_tail_info(mut self, tail: f64) -> Self {
        self.tail_bound = Some(tail);
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = Some(threshold);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A named CSV table produced by a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Result of one suite. `pass` is the conjunction of the check flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        VerificationReport {
            suite: suite.into(),
            timestamp,
            checks: vec![],
            pass: true,
            errors: vec![],
            tables: vec![],
        }
    }

    pub fn push(&mut self, check: CheckRecord) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    /// Records an error that prevented a check from running; fails the report.
    pub fn push_error(&mut self, context: &str, err: impl std::fmt::Display) {
        self.pass = false;
        self.errors.push(format!("{context}: {err}"));
    }

    /// Appends the checks, errors and tables of another report.
    pub fn merge(&mut self, other: VerificationReport) {
        for c in other.checks {
            self.push(c);
        }
        for e in other.errors {
            self.pass = false;
            self.errors.push(format!("{}: {e}", other.suite));
        }
        self.tables.extend(other.tables);
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}
