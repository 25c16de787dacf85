//! Two-stage dataset aggregation: seeds average within dataset first.

use std::collections::BTreeMap;

use crate::report::ReportCell;

use super::StatsError;

/// Aggregate of one `(condition, metric)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateGroup {
    pub condition: String,
    pub metric: String,
    /// Per-dataset means over seeds, dataset-sorted.
    pub per_dataset: Vec<(String, f64)>,
    /// Mean of the per-dataset means (the primary reporting value).
    pub two_stage_mean: f64,
    /// Plain mean over every cell; equals the two-stage mean when seed
    /// counts are balanced.
    pub flat_mean: f64,
    /// True when every dataset contributed the same number of seeds.
    pub balanced: bool,
}

/// Group cells by `(condition, metric)` and compute per-dataset means, the
/// grand mean of those means, and the flat mean. Unbalanced seed counts are
/// flagged, not rejected.
pub fn dataset_aggregate(cells: &[ReportCell]) -> Result<Vec<AggregateGroup>, StatsError> {
    if cells.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut groups: BTreeMap<(String, String), BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for c in cells {
        groups
            .entry((c.condition.clone(), c.metric.clone()))
            .or_default()
            .entry(c.dataset.clone())
            .or_default()
            .push(c.value);
    }
    Ok(groups
        .into_iter()
        .map(|((condition, metric), by_dataset)| {
            let counts: Vec<usize> = by_dataset.values().map(Vec::len).collect();
            let balanced = counts.windows(2).all(|w| w[0] == w[1]);
            let per_dataset: Vec<(String, f64)> = by_dataset
                .into_iter()
                .map(|(d, vs)| {
                    let mean = vs.iter().sum::<f64>() / vs.len() as f64;
                    (d, mean)
                })
                .collect();
            let two_stage_mean =
                per_dataset.iter().map(|(_, m)| m).sum::<f64>() / per_dataset.len() as f64;
            let all: Vec<f64> = cells
                .iter()
                .filter(|c| c.condition == condition && c.metric == metric)
                .map(|c| c.value)
                .collect();
            let flat_mean = all.iter().sum::<f64>() / all.len() as f64;
            AggregateGroup {
                condition,
                metric,
                per_dataset,
                two_stage_mean,
                flat_mean,
                balanced,
            }
        })
        .collect())
}
