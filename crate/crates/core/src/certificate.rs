//! Self-contained witnesses and their re-verification.
//!
//! ```json
//! {"claim": "exact-mu", "columns": [[[0,1],[1,0]], ...], "k": 2, "t": 2, "verified": true}
//! ```
//!
//! `columns[j]` joins the left fibers to right vertex `j` of `K_{k,t}`.
//! Bracket certificates also carry `lo`. Verification rebuilds the cover and
//! asks the backtracking solver for a coloring; the lower side of an exact or
//! bracket claim is re-derived from the counting bound or by re-running the
//! exhaustive search at `t - 1` (resp. `lo - 1`).

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::blocking::{blocked_set, ColumnClass};
use crate::bounds::counting_lower;
use crate::cover::MatchingCover;
use crate::error::{Error, Result};
use crate::mu::{cover_from_columns, decide_uncoverable, MuResult, MuValue};
use crate::perm::universe_size;
use crate::solver::find_coloring;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// The cover of `K_{k,t}` built from the columns has no coloring.
    Uncolorable,
    /// `μ(k) = t`.
    ExactMu,
    /// `lo <= μ(k) <= t`.
    Bracket,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub claim: Claim,
    pub columns: Vec<ColumnClass>,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<usize>,
    pub t: usize,
    pub verified: bool,
}

/// Result of re-checking a certificate or cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub verified: bool,
    /// One line per check performed.
    pub notes: Vec<String>,
    /// Short machine-readable reason for a failure.
    pub failure: Option<String>,
}

impl CheckReport {
    fn pass(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    fn fail(mut self, reason: impl Into<String>) -> Self {
        let reason = reason.into();
        self.notes.push(format!("FAILED: {reason}"));
        self.verified = false;
        self.failure = Some(reason);
        self
    }
}

impl Certificate {
    pub fn uncolorable(k: usize, columns: Vec<ColumnClass>) -> Self {
        Certificate {
            claim: Claim::Uncolorable,
            t: columns.len(),
            columns,
            k,
            lo: None,
            verified: false,
        }
    }

    pub fn from_mu_result(r: &MuResult) -> Self {
        let (claim, lo) = match r.value {
            MuValue::Exact(_) => (Claim::ExactMu, None),
            MuValue::Bracket { lo, .. } => (Claim::Bracket, Some(lo)),
        };
        Certificate {
            claim,
            columns: r.witness_columns.clone(),
            k: r.k,
            lo,
            t: r.witness_columns.len(),
            verified: false,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Re-derive the claim from the file contents alone. `budget` bounds any
    /// exhaustive search needed for the lower side.
    pub fn verify(&self, budget: u64) -> Result<CheckReport> {
        let mut report = CheckReport {
            verified: true,
            notes: Vec::new(),
            failure: None,
        };
        let k = self.k;
        if k == 0 {
            return Ok(report.fail("k-zero"));
        }
        if self.columns.len() != self.t {
            return Ok(report.fail(format!("column-count {} != t {}", self.columns.len(), self.t)));
        }
        if self.columns.iter().any(|c| c.k() != k) {
            return Ok(report.fail("column-size-mismatch"));
        }
        if k > 6 {
            return Err(Error::UnsupportedInput(format!("certificates are checked for k <= 6, got {k}")));
        }
        let mut union = BitSet::new(universe_size(k));
        for c in &self.columns {
            union.union_with(&blocked_set(c));
        }
        let missing = universe_size(k) - union.count();
        if missing > 0 {
            return Ok(report.fail(format!("coverage: {missing} assignments unblocked")));
        }
        report.pass(format!("coverage: {} columns block all {} assignments", self.t, universe_size(k)));
        let cover = cover_from_columns(k, &self.columns)?;
        if let Some(col) = find_coloring(&cover) {
            return Ok(report.fail(format!("solver found a coloring {col:?}")));
        }
        report.pass(format!("solver: cover of K_{{{k},{}}} has no coloring", self.t));

        let lower = match self.claim {
            Claim::Uncolorable => return Ok(report),
            Claim::ExactMu => self.t,
            Claim::Bracket => match self.lo {
                Some(lo) if lo <= self.t => lo,
                Some(lo) => return Ok(report.fail(format!("bracket lo {lo} > t {}", self.t))),
                None => return Ok(report.fail("bracket without lo")),
            },
        };
        let counting = counting_lower(k)?;
        if lower <= counting {
            if lower < counting && self.claim == Claim::ExactMu {
                return Ok(report.fail(format!("t {} below counting bound {counting}", self.t)));
            }
            report.pass(format!("lower side: {lower} <= ceil(k^k/k!) = {counting}"));
            return Ok(report);
        }
        match decide_uncoverable(k, lower - 1, budget) {
            Ok(false) => {
                report.pass(format!("lower side: exhaustive search, no {} columns suffice", lower - 1));
                Ok(report)
            }
            Ok(true) => Ok(report.fail(format!("{} columns already suffice", lower - 1))),
            Err(Error::ResourceLimit { reason, .. }) => Err(Error::ResourceLimit {
                reason: format!("re-verifying the lower side: {reason}"),
                lo: counting,
                hi: Some(self.t),
            }),
            Err(e) => Err(e),
        }
    }
}

/// Check that a cover file describes a cover with no coloring.
pub fn verify_cover(cover: &MatchingCover) -> CheckReport {
    let mut report = CheckReport {
        verified: true,
        notes: Vec::new(),
        failure: None,
    };
    match find_coloring(cover) {
        Some(col) => report.fail(format!("cover-colorable {col:?}")),
        None => {
            report.pass(format!(
                "solver: {}-fold cover on {} vertices has no coloring",
                cover.fold(),
                cover.graph().vertex_count()
            ));
            report
        }
    }
}
