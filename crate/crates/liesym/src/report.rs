//! Structured run reports shared by the CLI and the examples.
//!
//! A run produces one JSON document listing every checked item with its
//! residual and pass flag, plus the inputs needed to reproduce the run.
//! The schema is versioned so downstream consumers can detect changes.

use crate::Result;
use serde::Serialize;
use std::io::Write;
use std::time::Instant;

/// Bump whenever the serialized layout changes.
pub const SCHEMA_VERSION: u32 = 1;

/// One checked item: a table row, a reduction case, a solution family,
/// or a single numeric property.
#[derive(Clone, Debug, Serialize)]
pub struct ItemResult {
    pub id: String,
    pub pass: bool,
    /// Worst residual observed, when the check is numeric.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    /// Free-form context: witness point, adjudication outcome, counts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// A complete, reproducible record of one command invocation.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub items: Vec<ItemResult>,
    pub wall_time_ms: u64,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunReport {
    pub fn new(command: &str) -> RunReport {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            seed: None,
            samples: None,
            items: Vec::new(),
            wall_time_ms: 0,
            started: Some(Instant::now()),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> RunReport {
        self.seed = Some(seed);
        self
    }

    pub fn with_samples(mut self, samples: usize) -> RunReport {
        self.samples = Some(samples);
        self
    }

    pub fn push(&mut self, id: impl Into<String>, pass: bool, residual: Option<f64>, detail: Option<String>) {
        self.items.push(ItemResult {
            id: id.into(),
            pass,
            residual,
            detail,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    /// First failing item, for the exit-status diagnostic.
    pub fn first_failure(&self) -> Option<&ItemResult> {
        self.items.iter().find(|i| !i.pass)
    }

    /// Record the elapsed wall time since construction.
    pub fn finish(&mut self) {
        if let Some(t0) = self.started {
            self.wall_time_ms = t0.elapsed().as_millis() as u64;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Write the JSON document to a file, or to the writer when no path
    /// is given.
    pub fn write(&self, path: Option<&std::path::Path>, fallback: &mut dyn Write) -> Result<()> {
        let doc = self.to_json();
        match path {
            Some(p) => std::fs::write(p, doc.as_bytes())?,
            None => {
                fallback.write_all(doc.as_bytes())?;
                fallback.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    /// Human-readable one-line-per-item summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            let status = if item.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}  {}", item.id));
            if let Some(r) = item.residual {
                out.push_str(&format!("  residual {r:.3e}"));
            }
            if let Some(d) = &item.detail {
                out.push_str(&format!("  ({d})"));
            }
            out.push('\n');
        }
        let n = self.items.len();
        let ok = self.items.iter().filter(|i| i.pass).count();
        out.push_str(&format!("{ok}/{n} checks passed\n"));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trip_and_summary() {
        let mut r = RunReport::new("verify").with_seed(7).with_samples(3);
        r.push("T1/1", true, Some(0.0), None);
        r.push("T1/2", false, Some(0.5), Some("perturbed generator".to_string()));
        r.finish();
        assert!(!r.all_pass());
        assert_eq!(r.first_failure().unwrap().id, "T1/2");
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["schema_version"], SCHEMA_VERSION);
        assert_eq!(json["seed"], 7);
        assert_eq!(json["items"][1]["pass"], false);
        let s = r.summary();
        assert!(s.contains("PASS  T1/1"));
        assert!(s.contains("FAIL  T1/2"));
        assert!(s.contains("1/2 checks passed"));
    }

    #[test]
    fn deterministic_modulo_wall_time() {
        let build = || {
            let mut r = RunReport::new("reduce").with_seed(1);
            r.push("iii", true, Some(1e-12), None);
            r.wall_time_ms = 0;
            r.started = None;
            r.to_json()
        };
        assert_eq!(build(), build());
    }
}
