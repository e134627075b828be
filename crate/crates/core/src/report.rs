//! Machine-readable check records.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// `{check, params, samples, max_error, threshold, pass}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub samples: usize,
    pub max_error: f64,
    pub threshold: f64,
    pub pass: bool,
    /// False for rows that are reported but do not gate the exit status.
    pub asserted: bool,
}

impl CheckRecord {
    /// Builds an asserted record; `pass` is `max_error <= threshold`.
    pub fn new(check: impl Into<String>, samples: usize, max_error: f64, threshold: f64) -> Self {
        CheckRecord {
            check: check.into(),
            params: BTreeMap::new(),
            samples,
            max_error,
            threshold,
            pass: max_error <= threshold,
            asserted: true,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn report_only(mut self) -> Self {
        self.asserted = false;
        self
    }

    /// Folds another run of the same check into this one.
    pub fn merge(&mut self, other: &CheckRecord) {
        self.samples += other.samples;
        self.max_error = self.max_error.max(other.max_error);
        self.pass = self.max_error <= self.threshold;
    }
}

/// Outcome of spot-checking a growth theorem's starlike/convex hypothesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    Passed,
    Failed,
    NotChecked,
}

/// Growth-theorem record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRecord {
    pub check: String,
    pub family: String,
    pub map: String,
    /// Imaginary unit the map was built on.
    #[serde(rename = "I")]
    pub unit: String,
    pub m: usize,
    pub n: usize,
    pub theta: f64,
    pub r_max: f64,
    pub samples: usize,
    #[serde(rename = "N")]
    pub truncation: usize,
    pub hypothesis_status: HypothesisStatus,
    pub max_violation_lower: f64,
    pub max_violation_upper: f64,
    pub tail_bound: f64,
    pub pass: bool,
    pub asserted: bool,
}

impl GrowthRecord {
    /// Slack allowed on top of the tail bound.
    pub const SLACK: f64 = 1e-9;

    pub fn within_slack(&self) -> bool {
        self.max_violation_lower <= self.tail_bound + Self::SLACK
            && self.max_violation_upper <= self.tail_bound + Self::SLACK
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Record {
    Check(CheckRecord),
    Growth(GrowthRecord),
}

impl Record {
    pub fn check(&self) -> &str {
        match self {
            Record::Check(c) => &c.check,
            Record::Growth(g) => &g.check,
        }
    }

    pub fn pass(&self) -> bool {
        match self {
            Record::Check(c) => c.pass,
            Record::Growth(g) => g.pass,
        }
    }

    pub fn asserted(&self) -> bool {
        match self {
            Record::Check(c) => c.asserted,
            Record::Growth(g) => g.asserted,
        }
    }

    /// True unless an asserted row failed.
    pub fn ok(&self) -> bool {
        !self.asserted() || self.pass()
    }
}

impl From<CheckRecord> for Record {
    fn from(c: CheckRecord) -> Self {
        Record::Check(c)
    }
}

impl From<GrowthRecord> for Record {
    fn from(g: GrowthRecord) -> Self {
        Record::Growth(g)
    }
}
