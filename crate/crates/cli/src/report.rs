//! Deterministic experiment reports: a structured JSON document plus CSV
//! artifacts. Identical configs produce identical bytes; wall-clock timing is
//! attached only on request so the default output stays reproducible.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    /// What the run was expected to demonstrate, in one sentence.
    pub expectation: String,
    pub pass: bool,
    pub config: serde_json::Value,
    pub verdicts: serde_json::Value,
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl ExperimentReport {
    pub fn new<C: Serialize, V: Serialize>(
        experiment: &str,
        expectation: &str,
        pass: bool,
        config: &C,
        verdicts: &V,
    ) -> Result<ExperimentReport> {
        Ok(ExperimentReport {
            experiment: experiment.to_string(),
            expectation: expectation.to_string(),
            pass,
            config: serde_json::to_value(config)?,
            verdicts: serde_json::to_value(verdicts)?,
            artifacts: Vec::new(),
            timing_ms: None,
        })
    }

    /// Serializes to the canonical on-disk form.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("creating {}", out_dir.display()))?;
        let path = out_dir.join(format!("{}_report.json", self.experiment.to_lowercase()));
        std::fs::write(&path, self.to_json()?)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Writes one CSV artifact; `rows` already carry their column strings, the
/// header names them.
pub fn write_csv(
    out_dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let path = out_dir.join(name);
    let mut w = csv::Writer::from_path(&path)
        .with_context(|| format!("opening {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(path)
}

/// Renders a path relative to the output directory for the artifact list, so
/// reports do not embed absolute host paths.
pub fn artifact_name(out_dir: &Path, path: &Path) -> String {
    path.strip_prefix(out_dir)
        .unwrap_or(path)
        .display()
        .to_string()
}
