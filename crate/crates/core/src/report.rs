use std::fmt;

use serde::{Deserialize, Serialize};

/// How a residual is judged against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// The identity holds: pass iff `residual <= threshold`.
    AtMost,
    /// The identity is expected to break: pass iff `residual > threshold`.
    Exceeds,
    /// Recorded for inspection; always passes.
    Informational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticEntry {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    /// The identity being checked, written out as a formula.
    pub anchor: String,
    pub expect: Expectation,
}

impl DiagnosticEntry {
    pub fn new(
        name: impl Into<String>,
        residual: f64,
        threshold: f64,
        anchor: impl Into<String>,
        expect: Expectation,
    ) -> Self {
        let pass = match expect {
            Expectation::AtMost => residual <= threshold,
            Expectation::Exceeds => residual > threshold,
            Expectation::Informational => true,
        };
        Self {
            name: name.into(),
            residual,
            threshold,
            pass,
            anchor: anchor.into(),
            expect,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub entries: Vec<DiagnosticEntry>,
}

impl DiagnosticReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry that passes iff `residual <= threshold`.
    pub fn check(&mut self, name: &str, residual: f64, threshold: f64, anchor: &str) -> &mut Self {
        self.entries
            .push(DiagnosticEntry::new(name, residual, threshold, anchor, Expectation::AtMost));
        self
    }

    pub fn expect_exceeds(
        &mut self,
        name: &str,
        residual: f64,
        threshold: f64,
        anchor: &str,
    ) -> &mut Self {
        self.entries
            .push(DiagnosticEntry::new(name, residual, threshold, anchor, Expectation::Exceeds));
        self
    }

    pub fn record(&mut self, name: &str, value: f64, threshold: f64, anchor: &str) -> &mut Self {
        self.entries.push(DiagnosticEntry::new(
            name,
            value,
            threshold,
            anchor,
            Expectation::Informational,
        ));
        self
    }

    pub fn extend(&mut self, other: DiagnosticReport) {
        self.entries.extend(other.entries);
    }

    /// Appends `other`, prefixing every entry name.
    pub fn extend_prefixed(&mut self, prefix: &str, other: DiagnosticReport) {
        self.entries.extend(other.entries.into_iter().map(|mut e| {
            e.name = format!("{prefix}{}", e.name);
            e
        }));
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, name: &str) -> Option<&DiagnosticEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &DiagnosticEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for DiagnosticReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let rel = match e.expect {
                Expectation::AtMost => "<=",
                Expectation::Exceeds => "> ",
                Expectation::Informational => "~ ",
            };
            writeln!(
                f,
                "[{}] {:<44} {:.3e} {} {:.1e}   {}",
                if e.pass { "PASS" } else { "FAIL" },
                e.name,
                e.residual,
                rel,
                e.threshold,
                e.anchor
            )?;
        }
        Ok(())
    }
}

/// Relative residual `‖diff‖ / scale` guarded against a zero scale.
pub(crate) fn relative(diff: f64, scale: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff / scale.max(f64::MIN_POSITIVE)
    }
}
