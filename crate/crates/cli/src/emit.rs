//! Deterministic report emission: cells CSV, JSON summary, run manifest.
//!
//! Outputs are a pure function of the resolved configuration — no
//! timestamps, no machine identifiers — so identical invocations produce
//! byte-identical files at any worker-pool size.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Value};
use tabaudit::report::{cells_to_csv, ReportCell};
use tabaudit::rng::RNG_IDENTIFIER;
use tabaudit::stats::{dataset_aggregate, paired_bootstrap_ci};

pub struct RunOutput {
    pub dir: PathBuf,
}

impl RunOutput {
    pub fn create(dir: &Path) -> Result<RunOutput> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating output dir {}", dir.display()))?;
        Ok(RunOutput {
            dir: dir.to_path_buf(),
        })
    }

    pub fn write_cells(&self, cells: &[ReportCell]) -> Result<()> {
        let csv = cells_to_csv(cells)?;
        std::fs::write(self.dir.join("cells.csv"), csv)?;
        Ok(())
    }

    pub fn write_named_csv(&self, name: &str, content: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), content)?;
        Ok(())
    }

    pub fn write_summary(&self, summary: &Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(summary)?;
        text.push('\n');
        std::fs::write(self.dir.join("summary.json"), text)?;
        Ok(())
    }

    /// Resolved configuration echo plus toolkit version and RNG identifier.
    pub fn write_manifest(&self, subcommand: &str, entries: &BTreeMap<String, String>) -> Result<()> {
        let mut text = format!(
            "tool = tabaudit {}\nrng = {}\nsubcommand = {}\n",
            env!("CARGO_PKG_VERSION"),
            RNG_IDENTIFIER,
            subcommand
        );
        for (k, v) in entries {
            text.push_str(&format!("{k} = {v}\n"));
        }
        std::fs::write(self.dir.join("run_manifest.txt"), text)?;
        Ok(())
    }
}

/// Aggregate block mirrored into every summary: per `(condition, metric)`
/// two-stage means plus a bootstrap CI over per-dataset means (falling back
/// to per-seed values when only one dataset is present).
pub fn aggregate_block(cells: &[ReportCell], resamples: usize, level: f64) -> Result<Value> {
    let groups = dataset_aggregate(cells)?;
    let mut out = BTreeMap::new();
    for g in groups {
        let deltas: Vec<f64> = g.per_dataset.iter().map(|(_, v)| *v).collect();
        let ci = if deltas.len() >= 2 {
            paired_bootstrap_ci(&deltas, resamples, level, 0).ok()
        } else {
            // single dataset: resample its per-seed values instead
            let seed_vals: Vec<f64> = cells
                .iter()
                .filter(|c| c.condition == g.condition && c.metric == g.metric)
                .map(|c| c.value)
                .collect();
            if seed_vals.len() >= 2 {
                paired_bootstrap_ci(&seed_vals, resamples, level, 0).ok()
            } else {
                None
            }
        };
        let key = format!("{}::{}", g.condition, g.metric);
        out.insert(
            key,
            json!({
                "two_stage_mean": g.two_stage_mean,
                "flat_mean": g.flat_mean,
                "balanced": g.balanced,
                "per_dataset": g.per_dataset.iter().map(|(d, v)| json!([d, v])).collect::<Vec<_>>(),
                "ci": ci.map(|(lo, hi)| json!([lo, hi])),
            }),
        );
    }
    Ok(json!(out))
}
