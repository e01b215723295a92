//! Structured verdicts shared by all checkers.
//!
//! Every axiom-level check produces a [`CheckReport`]: a name, a verdict,
//! the first violating tuple when one exists, and provenance notes (partial
//! verification flags, adopted readings of ambiguous source formulas).
//! Failures are reported, not raised.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    /// The condition could not be evaluated from the data at hand (e.g. a
    /// map defined only in an external reference). Never counts as failure.
    NotEvaluated,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub verdict: Verdict,
    /// First violating tuple, rendered as text.
    pub witness: Option<String>,
    /// True when a quantifier was probed on basis data plus pairwise sums
    /// instead of exhaustively (enumeration budget exceeded).
    pub partial: bool,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            verdict: Verdict::Pass,
            witness: None,
            partial: false,
            notes: Vec::new(),
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            verdict: Verdict::Fail,
            witness: Some(witness.into()),
            partial: false,
            notes: Vec::new(),
        }
    }

    pub fn not_evaluated(name: impl Into<String>, note: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            verdict: Verdict::NotEvaluated,
            witness: None,
            partial: false,
            notes: vec![note.into()],
        }
    }

    pub fn with_partial(mut self, partial: bool) -> Self {
        self.partial = partial;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// A bundle of named checks with an aggregate verdict.
#[derive(Debug, Clone, Serialize, Default)]
pub struct ReportSet {
    pub checks: Vec<CheckReport>,
}

impl ReportSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: CheckReport) {
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn any_partial(&self) -> bool {
        self.checks.iter().any(|c| c.partial)
    }

    pub fn failed_names(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name.as_str())
            .collect()
    }
}

/// Budget for exhaustive quantifier enumeration, counted in evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(1 << 16)
    }
}
