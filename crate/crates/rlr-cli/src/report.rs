//! The command report: per-check verdicts with witnesses, computed
//! dimensions and canonical bases, and provenance notes. Rendering is
//! byte-stable for a fixed input: ordered maps, no timestamps.

use rlr_core::report::{CheckReport, Verdict};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize, Default)]
pub struct Report {
    pub command: String,
    pub subject: String,
    pub ok: bool,
    pub checks: Vec<CheckReport>,
    pub dimensions: BTreeMap<String, usize>,
    pub bases: BTreeMap<String, Vec<Vec<u32>>>,
    pub members: BTreeMap<String, bool>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, subject: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            subject: subject.into(),
            ok: true,
            ..Default::default()
        }
    }

    pub fn push_checks(&mut self, checks: impl IntoIterator<Item = CheckReport>) {
        for c in checks {
            if c.verdict == Verdict::Fail {
                self.ok = false;
            }
            self.checks.push(c);
        }
    }

    pub fn dim(&mut self, name: impl Into<String>, value: usize) {
        self.dimensions.insert(name.into(), value);
    }

    pub fn basis(&mut self, name: impl Into<String>, vectors: Vec<Vec<u32>>) {
        self.bases.insert(name.into(), vectors);
    }

    pub fn member(&mut self, name: impl Into<String>, value: bool) {
        self.members.insert(name.into(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("subject: {}\n", self.subject));
        for c in &self.checks {
            let verdict = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
                Verdict::NotEvaluated => "not evaluated",
            };
            out.push_str(&format!("  check {:<40} {}", c.name, verdict));
            if c.partial {
                out.push_str(" (partial verification)");
            }
            if let Some(w) = &c.witness {
                out.push_str(&format!("  at {w}"));
            }
            out.push('\n');
            for n in &c.notes {
                out.push_str(&format!("        note: {n}\n"));
            }
        }
        for (k, v) in &self.dimensions {
            out.push_str(&format!("  {k} = {v}\n"));
        }
        for (k, basis) in &self.bases {
            out.push_str(&format!("  basis {k} ({} vectors)\n", basis.len()));
            for b in basis {
                out.push_str(&format!("    {b:?}\n"));
            }
        }
        for (k, v) in &self.members {
            out.push_str(&format!("  member {k}: {v}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out.push_str(&format!("result: {}\n", if self.ok { "ok" } else { "CHECK FAILURE" }));
        out
    }

    pub fn render(&self, format: crate::OutputFormat) -> String {
        match format {
            crate::OutputFormat::Text => self.render_text(),
            crate::OutputFormat::Json => self.render_json(),
        }
    }
}
