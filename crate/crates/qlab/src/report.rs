//! Shared verification report types.
//!
//! Every verifier (congruence sweeps, Newman recurrences, Hecke checks)
//! reports through [`VerificationReport`]: which statement instance ran,
//! over which n-range, with what outcome. A failed check always carries at
//! least one explicit witness with both sides' values; a skipped check always
//! carries the unmet hypothesis.

use serde::{Deserialize, Serialize};

/// Outcome of a single verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// A counterexample: index n with the two sides that should have agreed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub n: u64,
    pub lhs: String,
    pub rhs: String,
}

/// Result of checking one parameter instantiation of one statement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Family or identity id, e.g. a congruence-family name.
    pub id: String,
    /// Human-readable parameter instantiation, e.g. "p=7, alpha=1".
    pub params: String,
    /// Inclusive n-range actually checked (after any table clamping).
    pub n_min: u64,
    pub n_max: u64,
    /// Number of indices checked after per-n filtering.
    pub checked: u64,
    pub status: Status,
    /// Present and non-empty exactly when status is Fail.
    pub witnesses: Vec<Witness>,
    /// Present exactly when status is Skip: which hypothesis was unmet.
    pub skip_reason: Option<String>,
    /// Free-form notes: hypothesis evaluations, bound clamping, caveats.
    pub notes: Vec<String>,
    /// Failures on instances marked informational do not flip exit codes.
    pub informational: bool,
    /// Wall-clock duration of this run.
    pub millis: u128,
}

impl VerificationReport {
    pub fn new(id: impl Into<String>, params: impl Into<String>) -> Self {
        VerificationReport {
            id: id.into(),
            params: params.into(),
            n_min: 0,
            n_max: 0,
            checked: 0,
            status: Status::Skip,
            witnesses: Vec::new(),
            skip_reason: None,
            notes: Vec::new(),
            informational: false,
            millis: 0,
        }
    }

    /// True when this report should flip an aggregate exit code to failure.
    pub fn is_blocking_failure(&self) -> bool {
        self.status == Status::Fail && !self.informational
    }
}
