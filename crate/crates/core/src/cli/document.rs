use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::report::{DiagnosticEntry, DiagnosticReport};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// What every command prints. Field order is fixed by the declaration
/// below and `data` is key-sorted, so the JSON form is byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool_version: String,
    pub command: String,
    pub tolerances: ToleranceConfig,
    pub entries: Vec<DiagnosticEntry>,
    pub verdict: bool,
    #[serde(default)]
    pub data: BTreeMap<String, Value>,
}

impl ReportDocument {
    pub fn new(command: &str, tolerances: ToleranceConfig, report: DiagnosticReport) -> Self {
        let verdict = report.all_pass();
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            tolerances,
            entries: report.entries,
            verdict,
            data: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.data.insert(key.to_string(), value);
        self
    }

    pub fn report(&self) -> DiagnosticReport {
        DiagnosticReport {
            entries: self.entries.clone(),
        }
    }
}

pub fn emit_report(doc: &ReportDocument, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => emit_text(doc),
    }
}

fn emit_text(doc: &ReportDocument) -> String {
    let t = &doc.tolerances;
    let mut s = String::new();
    let _ = writeln!(s, "gammadyn {}  command: {}", doc.tool_version, doc.command);
    let _ = writeln!(
        s,
        "tolerances: reality {:e}, gap {:e}, residual {:e}, series {:e}, rank {:e}",
        t.reality_tol, t.gap_tol, t.residual_tol, t.series_tol, t.rank_tol
    );
    for (k, v) in &doc.data {
        let _ = writeln!(s, "{k}: {v}");
    }
    let _ = write!(s, "{}", doc.report());
    let failures = doc.entries.iter().filter(|e| !e.pass).count();
    let _ = writeln!(
        s,
        "verdict: {} ({} entries, {} failing)",
        if doc.verdict { "PASS" } else { "FAIL" },
        doc.entries.len(),
        failures
    );
    s
}
